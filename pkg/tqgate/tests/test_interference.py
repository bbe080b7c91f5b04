import math

import numpy as np
import pytest

from tqgate.custom_exceptions import ParameterDomainError, UnsupportedRegimeError
from tqgate.interference import (
    InterferenceConfig,
    evaluate_ib,
    evaluate_ibf,
    evaluate_ibf_mismatch,
    ib_efficiency,
    ib_fidelity,
    ibf_efficiency,
    ibf_fidelity,
    ibf_fidelity_mismatch,
    overlap_quadrature,
)
from tqgate.params import derive_cavity_from_c, load_preset
from tqgate.test_util import ideal_emitter, lossless_setup

TWO_PI = 2 * np.pi
DETECTION_TIMES = np.geomspace(1e-9, 10e-6, 60)


def with_window(preset, detection_time, delta_t=None):
    return InterferenceConfig(
        detection_time=detection_time,
        delta_t=preset.delta_t if delta_t is None else delta_t,
    )


def test_config_rejects_negative_times():
    with pytest.raises(ParameterDomainError, match="detection_time"):
        InterferenceConfig(detection_time=-1e-9)
    with pytest.raises(ParameterDomainError, match="delta_t"):
        InterferenceConfig(detection_time=1e-9, delta_t=-1.0)


def test_efficiencies_vanish_without_window(scenario1):
    cfg = with_window(scenario1, 0.0)
    assert ib_efficiency(cfg, scenario1.cavity, scenario1.detection) == 0
    assert ibf_efficiency(cfg, scenario1.cavity, scenario1.detection) == 0


def test_ideal_efficiency_limits():
    emitter, cavity, detection = lossless_setup()
    cfg = InterferenceConfig(detection_time=math.inf)
    assert ib_efficiency(cfg, cavity, detection) == pytest.approx(0.5, abs=1e-8)
    assert ibf_efficiency(cfg, cavity, detection) == pytest.approx(1.0, abs=1e-8)


def test_ib_saturation_efficiency():
    # η_em = 0.93 as quoted for scenario 1.
    preset = load_preset("scenario1", [f"cooperativity={0.93 / 0.07!r}"])
    cfg = with_window(preset, math.inf)
    assert ib_efficiency(cfg, preset.cavity, preset.detection) == pytest.approx(0.3161, abs=5e-4)

    cfg = with_window(preset, 500e-9)
    assert ib_efficiency(cfg, preset.cavity, preset.detection) == pytest.approx(0.3159, abs=2e-4)


def test_ibf_optical_limit_efficiency():
    preset = load_preset("scenario2", [f"emitter.gamma={12.7e6 / 75!r}", "cooperativity=74"])
    assert preset.cavity.gamma_prime == pytest.approx(TWO_PI * 12.7e6)
    cfg = with_window(preset, math.inf)
    efficiency = ibf_efficiency(cfg, preset.cavity, preset.detection)
    assert efficiency == pytest.approx(0.636, abs=1e-3)
    assert efficiency > 0.5


@pytest.mark.parametrize("detection_time", [0.0, 1e-12, 1e-9, 500e-9, math.inf])
def test_fidelity_is_one_without_decoherence(detection_time):
    emitter, cavity, _ = lossless_setup(cooperativity=50)
    cfg = InterferenceConfig(detection_time=detection_time)
    assert ib_fidelity(cfg, cavity, emitter) == pytest.approx(1.0, abs=1e-12)
    assert ibf_fidelity(cfg, cavity, emitter) == pytest.approx(1.0, abs=1e-12)


def test_distinguishable_photons():
    emitter = ideal_emitter(gamma=1e6, gamma_star=1e30)
    cavity = derive_cavity_from_c(10, emitter)
    cfg = InterferenceConfig(detection_time=1e-6)
    assert ib_fidelity(cfg, cavity, emitter) == pytest.approx(0.5, abs=1e-12)
    assert ibf_fidelity(cfg, cavity, emitter) == pytest.approx(0.5, abs=1e-12)


def test_ib_fidelity_scenario1(scenario1):
    cfg = with_window(scenario1, 500e-9)
    assert ib_fidelity(cfg, scenario1.cavity, scenario1.emitter) == pytest.approx(0.929, abs=1e-3)


def test_ibf_fidelity_scenario2(scenario2):
    cfg = with_window(scenario2, 10e-9)
    assert 0.97 < ibf_fidelity(cfg, scenario2.cavity, scenario2.emitter) < 1.0


def test_ibf_long_feedback_delay(scenario2):
    cfg = with_window(scenario2, 10e-9, delta_t=1.0)
    assert ibf_fidelity(cfg, scenario2.cavity, scenario2.emitter) == pytest.approx(0.5, abs=1e-12)


def test_ib_fidelity_drops_below_0_9_near_2_1_mhz():
    def fidelity(gamma_star_hz):
        preset = load_preset("scenario2", [f"gamma_star={gamma_star_hz!r}"])
        cfg = with_window(preset, 10e-9)
        return ib_fidelity(cfg, preset.cavity, preset.emitter)

    assert fidelity(0.75 * 2.1e6) > 0.9
    assert fidelity(1.25 * 2.1e6) < 0.9
    assert fidelity(2.1e6) == pytest.approx(0.9, abs=2e-3)


@pytest.mark.parametrize("name", ["scenario1", "scenario2"])
def test_monotonic_in_detection_time(name):
    preset = load_preset(name)
    cfgs = [with_window(preset, T) for T in DETECTION_TIMES]
    c, e, d = preset.cavity, preset.emitter, preset.detection

    for efficiency in (ib_efficiency, ibf_efficiency):
        values = np.array([efficiency(cfg, c, d) for cfg in cfgs])
        assert np.all(np.diff(values) >= 0)

    for fidelity in (ib_fidelity, ibf_fidelity):
        values = np.array([fidelity(cfg, c, e) for cfg in cfgs])
        assert np.all(np.diff(values) <= 1e-15)
        assert np.all((values >= 0) & (values <= 1))


@pytest.mark.parametrize("detection_time", [10e-9, 500e-9])
def test_ibf_more_efficient_at_low_cooperativity(detection_time):
    for C in range(1, 50):
        preset = load_preset("scenario2", [f"cooperativity={C}"])
        cfg = with_window(preset, detection_time)
        assert ibf_efficiency(cfg, preset.cavity, preset.detection) > ib_efficiency(
            cfg, preset.cavity, preset.detection
        )


def test_ibf_efficiency_vanishes_at_large_cooperativity(scenario1):
    emitter = scenario1.emitter
    cfg = with_window(scenario1, 500e-9)
    cavity = derive_cavity_from_c(1e6, emitter)
    assert ibf_efficiency(cfg, cavity, scenario1.detection) < 1e-100


def test_small_window_limit(scenario2):
    c, e = scenario2.cavity, scenario2.emitter
    at_zero = ibf_fidelity(with_window(scenario2, 0.0), c, e)
    near_zero = ibf_fidelity(with_window(scenario2, 1e-15), c, e)
    assert at_zero == pytest.approx(near_zero, abs=1e-9)
    assert at_zero == pytest.approx(
        0.5 * (1 + np.exp(-scenario2.delta_t * (2 * e.gamma_star + e.gamma_s_star))),
        rel=1e-12,
    )


@pytest.fixture
def spinless2():
    return load_preset("scenario2", ["emitter.t1_spin=null", "emitter.t2_spin=null"])


def test_mismatch_reduces_to_ibf(spinless2):
    cfg = with_window(spinless2, 50e-9)
    assert ibf_fidelity_mismatch(cfg, spinless2.cavity, spinless2.emitter) == pytest.approx(
        ibf_fidelity(cfg, spinless2.cavity, spinless2.emitter), abs=1e-12
    )


def test_mismatch_phase_flip():
    emitter, cavity, _ = lossless_setup(cooperativity=50)
    cfg = InterferenceConfig(detection_time=math.inf, phi_init=np.pi / 2, phi_prop=np.pi / 2)
    assert ibf_fidelity_mismatch(cfg, cavity, emitter) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("detection_time", [10e-9, 200e-9, math.inf])
def test_mismatch_matches_quadrature(spinless2, detection_time):
    emitter, cavity = spinless2.emitter, spinless2.cavity
    linewidth = cavity.gamma_prime + 2 * emitter.gamma_star
    cfg = InterferenceConfig(
        detection_time=detection_time, delta_t=spinless2.delta_t, delta=linewidth, phi_init=0.1
    )
    closed = ibf_fidelity_mismatch(cfg, cavity, emitter)
    assert closed < ibf_fidelity(cfg, cavity, emitter)
    assert overlap_quadrature(cfg, cavity, emitter) == pytest.approx(closed, rel=1e-7)


def test_mismatch_refuses_spin_dephasing(scenario2):
    cfg = InterferenceConfig(detection_time=10e-9, delta=1e6)
    with pytest.raises(UnsupportedRegimeError):
        ibf_fidelity_mismatch(cfg, scenario2.cavity, scenario2.emitter)
    with pytest.raises(UnsupportedRegimeError):
        overlap_quadrature(cfg, scenario2.cavity, scenario2.emitter)


def test_evaluators(scenario1):
    ib = evaluate_ib(scenario1)
    ibf = evaluate_ibf(scenario1)
    assert ib.gate_time == pytest.approx(2 * 500e-9 + 20.9e-9)
    assert ibf.gate_time == ib.gate_time
    assert ib.flags == () and ibf.flags == ()
    assert ibf.fidelity > ib.fidelity


def test_evaluate_with_mismatch():
    preset = load_preset(
        "scenario2", ["emitter.t1_spin=null", "emitter.t2_spin=null", "scheme.delta=1e6"]
    )
    mismatched = evaluate_ibf_mismatch(preset)
    assert evaluate_ibf(preset) == mismatched
    assert mismatched.fidelity < evaluate_ibf(load_preset("scenario2", ["t1_spin=null", "t2_spin=null"])).fidelity
