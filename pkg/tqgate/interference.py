"""Closed-form models for the two-round photon-interference schemes.

IB is the Barrett-Kok protocol: both emitters start in a ground-state
superposition, are optically excited, and a single detector click is
required in each of two rounds separated by a spin flip.  IBF starts both
emitters in the excited state and applies the spin flip as feedforward
after the first click, within δt.
"""

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .custom_exceptions import ParameterDomainError, UnsupportedRegimeError
from .log import warn_once
from .metrics import GateMetrics
from .params import eta_prime

# Below this γ′T_d the window ratios are evaluated by their series limit.
SERIES_THRESHOLD = 1e-8


@dataclass(frozen=True)
class InterferenceConfig:
    detection_time: float
    delta_t: float = 0.0
    delta: float = 0.0
    phi_init: float = 0.0
    phi_prop: float = 0.0

    def __post_init__(self):
        if not self.detection_time >= 0:
            raise ParameterDomainError("must be >= 0", path="scheme.detection_time")
        if not self.delta_t >= 0:
            raise ParameterDomainError("must be >= 0", path="scheme.delta_t")

    @property
    def mismatched(self):
        return bool(self.delta or self.phi_init or self.phi_prop)

    @classmethod
    def from_preset(cls, preset):
        knobs = preset.scheme
        return cls(
            detection_time=knobs["detection_time"],
            delta_t=preset.delta_t,
            delta=knobs.get("delta") or 0.0,
            phi_init=knobs.get("phi_init") or 0.0,
            phi_prop=knobs.get("phi_prop") or 0.0,
        )


def _emitted(rate, detection_time):
    """1 − e^{−rate·T_d}; `rate` may be complex, `T_d` may be infinite."""
    if np.isinf(detection_time):
        return 1.0
    return -np.expm1(-rate * detection_time)


def _window_overlap(gamma_prime, rate, detection_time):
    """(γ′/z)(1 − e^{−z T_d}) / (1 − e^{−γ′ T_d}) for a coherence rate z.

    This is the wavepacket overlap accumulated over one detection window,
    normalised by the emitted population.  Small windows use the series
    limit so that T_d = 0 is well defined.
    """
    if gamma_prime * detection_time < SERIES_THRESHOLD:
        y = rate * detection_time
        if abs(y) < SERIES_THRESHOLD:
            return 1.0 - y / 2
        return -np.expm1(-y) / y
    return (
        gamma_prime
        / rate
        * _emitted(rate, detection_time)
        / _emitted(gamma_prime, detection_time)
    )


def _coherence_rate(cavity, emitter):
    """Γ′ + γ*_s with Γ′ = γ′ + 2γ*."""
    return cavity.gamma_prime + 2 * emitter.gamma_star + emitter.gamma_s_star


def ib_gate_time(cfg):
    return 2 * cfg.detection_time + cfg.delta_t


ibf_gate_time = ib_gate_time


def ib_efficiency(cfg, cavity, det):
    """η_IB = (η′²/2)(1 − e^{−γ′T_d})²."""
    eta = eta_prime(cavity, det)
    return float(0.5 * eta**2 * _emitted(cavity.gamma_prime, cfg.detection_time) ** 2)


def ib_fidelity(cfg, cavity, emitter):
    """Bell-state fidelity of the IB scheme.

    The overlap of the two emitted wavepackets is taken once per round,
    with the spin-dephasing factor e^{−2γ*_s δt} accumulated between them.
    """
    ratio = _window_overlap(
        cavity.gamma_prime, _coherence_rate(cavity, emitter), cfg.detection_time
    ) * np.exp(-2 * emitter.gamma_s_star * cfg.delta_t)
    return float(0.5 * (1 + ratio**2))


def ibf_efficiency(cfg, cavity, det):
    """η_IBF = η′² e^{−γ′δt}(1 − e^{−2γ′T_d})(1 − e^{−γ′T_d})."""
    eta = eta_prime(cavity, det)
    gamma_prime = cavity.gamma_prime
    return float(
        eta**2
        * np.exp(-gamma_prime * cfg.delta_t)
        * _emitted(2 * gamma_prime, cfg.detection_time)
        * _emitted(gamma_prime, cfg.detection_time)
    )


def ibf_fidelity(cfg, cavity, emitter):
    ratio = _window_overlap(
        cavity.gamma_prime, _coherence_rate(cavity, emitter), cfg.detection_time
    ) * np.exp(-cfg.delta_t * (2 * emitter.gamma_star + emitter.gamma_s_star))
    return float(0.5 * (1 + ratio))


def _require_no_spin_dephasing(emitter):
    if emitter.gamma_s_star != 0:
        raise UnsupportedRegimeError(
            "no closed form combines spin dephasing with frequency or phase "
            "mismatch; set emitter.t1_spin and emitter.t2_spin to null",
            path="emitter.t2_spin",
        )


def _mismatch_phase(cfg, emitter):
    return np.exp(-cfg.delta_t * (2 * emitter.gamma_star + 1j * cfg.delta)) * np.exp(
        1j * (cfg.phi_init + cfg.phi_prop)
    )


def ibf_fidelity_mismatch(cfg, cavity, emitter):
    """IBF fidelity with optical frequency mismatch Δ and phase errors φ, ϕ.

    Only defined without spin dephasing.
    """
    _require_no_spin_dephasing(emitter)
    rate = cavity.gamma_prime + 2 * emitter.gamma_star + 1j * cfg.delta
    ratio = _window_overlap(
        cavity.gamma_prime, rate, cfg.detection_time
    ) * _mismatch_phase(cfg, emitter)
    return float(0.5 * (1 + ratio.real))


def overlap_quadrature(cfg, cavity, emitter):
    """`ibf_fidelity_mismatch` with the overlap integral done numerically.

    ∫₀^{T_d} γ′ e^{−(Γ′ + iΔ)t} dt is integrated by adaptive quadrature,
    one call each for the real and imaginary parts.
    """
    _require_no_spin_dephasing(emitter)
    gamma_prime = cavity.gamma_prime
    decay = gamma_prime + 2 * emitter.gamma_star
    T = cfg.detection_time

    emitted = _emitted(gamma_prime, T)
    if emitted == 0:
        return 1.0

    def real_part(t):
        return gamma_prime * np.exp(-decay * t) * np.cos(cfg.delta * t)

    def imag_part(t):
        return -gamma_prime * np.exp(-decay * t) * np.sin(cfg.delta * t)

    re, _ = integrate.quad(real_part, 0, T, limit=200, epsabs=1e-14, epsrel=1e-12)
    im, _ = integrate.quad(imag_part, 0, T, limit=200, epsabs=1e-14, epsrel=1e-12)

    ratio = complex(re, im) / emitted * _mismatch_phase(cfg, emitter)
    return float(0.5 * (1 + ratio.real))


def evaluate_ib(preset):
    cfg = InterferenceConfig.from_preset(preset)
    if cfg.mismatched:
        warn_once("interference", "IB ignores scheme.delta, phi_init and phi_prop")
    return GateMetrics.from_raw(
        fidelity=ib_fidelity(cfg, preset.cavity, preset.emitter),
        efficiency=ib_efficiency(cfg, preset.cavity, preset.detection),
        gate_time=ib_gate_time(cfg),
    )


def evaluate_ibf(preset):
    """IBF metrics; frequency or phase mismatch selects the mismatch form."""
    cfg = InterferenceConfig.from_preset(preset)
    if cfg.mismatched:
        fidelity = ibf_fidelity_mismatch(cfg, preset.cavity, preset.emitter)
    else:
        fidelity = ibf_fidelity(cfg, preset.cavity, preset.emitter)
    return GateMetrics.from_raw(
        fidelity=fidelity,
        efficiency=ibf_efficiency(cfg, preset.cavity, preset.detection),
        gate_time=ibf_gate_time(cfg),
    )


def evaluate_ibf_mismatch(preset):
    cfg = InterferenceConfig.from_preset(preset)
    return GateMetrics.from_raw(
        fidelity=ibf_fidelity_mismatch(cfg, preset.cavity, preset.emitter),
        efficiency=ibf_efficiency(cfg, preset.cavity, preset.detection),
        gate_time=ibf_gate_time(cfg),
    )
