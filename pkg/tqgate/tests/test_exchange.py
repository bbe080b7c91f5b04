import numpy as np
import pytest

from tqgate.custom_exceptions import ParameterDomainError
from tqgate.exchange import (
    ExchangeConfig,
    effective_cooperativity,
    effective_cooperativity_for,
    evaluate_rvp,
    evaluate_vp,
    rvp_fidelity,
    rvp_gate_time,
    vp_fidelity,
    vp_gate_time,
)
from tqgate.params import load_preset
from tqgate.test_util import ideal_emitter

TWO_PI = 2 * np.pi
GAMMA = TWO_PI * 12.7e6 / 75


def test_vp_gate_time():
    assert vp_gate_time(74, GAMMA) == pytest.approx(0.6865e-6, rel=1e-4)
    assert vp_gate_time(1e4, GAMMA) == pytest.approx(59.05e-9, rel=1e-3)
    with pytest.raises(ParameterDomainError):
        vp_gate_time(0, GAMMA)


def test_vp_fidelity_cooperativity_limited():
    emitter = ideal_emitter(gamma=GAMMA)
    C = (TWO_PI / 0.01) ** 2
    cfg = ExchangeConfig(delta_eg=np.inf)
    t_vp = vp_gate_time(C, emitter.gamma)
    assert vp_fidelity(cfg, C, emitter, t_vp) == pytest.approx(0.99006, abs=1e-5)


def test_vp_fidelity_penalizes_dephasing():
    C = 1e4
    clean = ideal_emitter(gamma=GAMMA)
    noisy = ideal_emitter(gamma=GAMMA, gamma_star=TWO_PI * 1e5)
    cfg = ExchangeConfig()
    t_vp = vp_gate_time(C, GAMMA)
    assert vp_fidelity(cfg, C, clean, t_vp) - vp_fidelity(cfg, C, noisy, t_vp) == pytest.approx(
        0.58 * t_vp * TWO_PI * 1e5
    )


def test_vp_rejects_zero_splitting():
    with pytest.raises(ParameterDomainError):
        vp_fidelity(ExchangeConfig(delta_eg=0.0), 74, ideal_emitter(), 1e-6)


def test_effective_cooperativity():
    assert effective_cooperativity(100, 1.0, 1.0) == pytest.approx(100)
    assert effective_cooperativity(100, 1.0, 2.0) == pytest.approx(100 / 0.65)
    assert effective_cooperativity(100, 1.0, 0.5) == pytest.approx(100 / 1.7)
    with pytest.raises(ParameterDomainError):
        effective_cooperativity(100, 1.0, 2.5)


def test_lifetime_limited_emitter_gains_cooperativity():
    emitter = ideal_emitter(gamma=GAMMA)
    assert effective_cooperativity_for(74, emitter) == pytest.approx(74 / 0.65)


def test_rvp_fidelity_upper_bound():
    assert rvp_fidelity(ExchangeConfig(), 1e4, ideal_emitter(), 1e-6) == pytest.approx(
        0.93939, abs=1e-5
    )


def test_rvp_gate_time():
    assert rvp_gate_time(74, GAMMA, 10) == pytest.approx(100 * vp_gate_time(74, GAMMA))
    with pytest.raises(ParameterDomainError):
        rvp_gate_time(74, GAMMA, 0.5)


def test_rvp_at_least_vp():
    emitter = ideal_emitter(gamma=GAMMA)
    cfg = ExchangeConfig()
    for C in np.geomspace(50, 1e6, 40):
        t_vp = vp_gate_time(C, GAMMA)
        vp = vp_fidelity(cfg, C, emitter, t_vp)
        rvp = rvp_fidelity(cfg, C, emitter, rvp_gate_time(C, GAMMA, 10))
        assert rvp >= vp


def test_rvp_shelving_decoherence():
    emitter = ideal_emitter(gamma=GAMMA, t2_spin=2.1e-3)
    t_rvp = 1e-5
    default = rvp_fidelity(ExchangeConfig(), 1e4, emitter, t_rvp)
    explicit = rvp_fidelity(ExchangeConfig(shelving_decoherence=1e3), 1e4, emitter, t_rvp)
    assert default - explicit == pytest.approx((1e3 - 1 / 2.1e-3) * t_rvp)


def test_rvp_detuning_needs_cavity_detuning():
    with pytest.raises(ParameterDomainError, match="cavity_detuning"):
        rvp_fidelity(ExchangeConfig(delta_eps=1e6), 1e4, ideal_emitter(), 1e-6)


def test_raman_ratio_limits():
    ExchangeConfig(cavity_detuning=1e9, rabi=1.5e8)
    with pytest.raises(ParameterDomainError, match="raman_rabi"):
        ExchangeConfig(cavity_detuning=1e9, rabi=3e8)
    assert ExchangeConfig(cavity_detuning=1e9, rabi=1e8).delta_over_rabi == pytest.approx(10)


def test_evaluate_vp(scenario1, scenario2):
    metrics = evaluate_vp(scenario2)
    assert metrics.gate_time == pytest.approx(
        vp_gate_time(scenario2.cavity.cooperativity, scenario2.emitter.gamma)
    )
    assert metrics.efficiency == 1
    assert "gate_slower_than_t1h" not in metrics.flags

    slow = evaluate_vp(scenario1)
    assert "gate_slower_than_t1h" in slow.flags


def test_evaluate_vp_strong_coupling():
    metrics = evaluate_vp(load_preset("scenario2", ["g_over_kappa=2"]))
    assert "strong_coupling" in metrics.flags


def test_evaluate_rvp(scenario2):
    metrics = evaluate_rvp(scenario2)
    c_eff = effective_cooperativity_for(scenario2.cavity.cooperativity, scenario2.emitter)
    assert metrics.gate_time == pytest.approx(100 * vp_gate_time(c_eff, scenario2.emitter.gamma))
    assert metrics.efficiency == 1


def test_evaluate_rvp_needs_drive():
    with pytest.raises(ParameterDomainError):
        evaluate_rvp(load_preset("scenario2", ["raman_rabi=null"]))
