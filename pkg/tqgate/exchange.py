"""Virtual-photon exchange gates.

In the simple scheme (VP) both emitters couple off-resonantly to a shared
cavity mode and exchange a virtual photon; the Raman scheme (RVP) drives a
two-photon transition detuned by Δ so the excited state is never
populated, at the cost of a (Δ/Ω)² slower gate.
"""

from dataclasses import dataclass

import numpy as np

from .custom_exceptions import ParameterDomainError
from .log import warn_once
from .metrics import GateMetrics, merge_flags

# Optical-dephasing coefficient of the VP fidelity, fitted to master-equation results.
VP_DEPHASING_COEFFICIENT = 0.58

RVP_RATIO_WARNING = 0.1
RVP_RATIO_LIMIT = 0.2


@dataclass(frozen=True)
class ExchangeConfig:
    delta_eps: float = 0.0
    delta_eg: float = 2 * np.pi * 1.62e9
    two_photon_error: float = 0.0
    cavity_detuning: float = None
    rabi: float = None
    shelving_decoherence: float = None

    def __post_init__(self):
        if self.cavity_detuning is None or self.rabi is None:
            return
        if not self.cavity_detuning > 0 or not self.rabi > 0:
            raise ParameterDomainError(
                "Raman drive needs positive Ω and Δ", path="scheme.raman_rabi"
            )
        ratio = self.rabi / self.cavity_detuning
        if ratio > RVP_RATIO_LIMIT:
            raise ParameterDomainError(
                f"Ω/Δ = {ratio:.3g} exceeds {RVP_RATIO_LIMIT}; the Raman scheme "
                "needs Ω ≪ Δ",
                path="scheme.raman_rabi",
            )
        if ratio > RVP_RATIO_WARNING:
            warn_once("exchange", f"Ω/Δ = {ratio:.3g} is above {RVP_RATIO_WARNING}")

    @property
    def delta_over_rabi(self):
        return self.cavity_detuning / self.rabi

    @classmethod
    def from_preset(cls, preset):
        knobs = preset.scheme
        return cls(
            delta_eps=knobs.get("delta_eps") or 0.0,
            delta_eg=knobs["delta_eg"],
            two_photon_error=knobs.get("two_photon_error") or 0.0,
            cavity_detuning=knobs.get("cavity_detuning"),
            rabi=knobs.get("raman_rabi"),
            shelving_decoherence=knobs.get("shelving_decoherence"),
        )


def _check_positive(value, path):
    if not value > 0:
        raise ParameterDomainError(f"must be > 0, got {value}", path=path)


def vp_gate_time(C, gamma):
    """T_VP = 2π/(γ√C)."""
    _check_positive(C, "cavity.cooperativity")
    _check_positive(gamma, "emitter.gamma")
    return float(2 * np.pi / (gamma * np.sqrt(C)))


def vp_fidelity(cfg, C, emitter, t_vp, clamp=True):
    _check_positive(C, "cavity.cooperativity")
    if cfg.delta_eg == 0:
        raise ParameterDomainError("must be non-zero", path="scheme.delta_eg")

    spectral = (
        (t_vp * cfg.delta_eps / (2 * np.pi)) ** 2
        + (2 * np.pi / (t_vp * cfg.delta_eg)) ** 2
        - 12 / C
    )
    raw = (
        1
        - 2 * np.pi / np.sqrt(C)
        - emitter.spin_decoherence * t_vp
        - VP_DEPHASING_COEFFICIENT * t_vp * emitter.gamma_star
        - 6 * np.pi**2 / 32 * spectral
    )
    return float(np.clip(raw, 0, 1)) if clamp else float(raw)


def effective_cooperativity(C, t1h, t2h):
    """C_eff = C/[1 + 0.7(T1h/T2h − 1)]: cooperativity reduced by optical dephasing."""
    _check_positive(t1h, "t1h")
    _check_positive(t2h, "t2h")
    if t2h > 2 * t1h * (1 + 1e-12):
        raise ParameterDomainError(f"T2h = {t2h} exceeds 2 T1h = {2 * t1h}", path="t2h")
    return float(C / (1 + 0.7 * (t1h / t2h - 1)))


def effective_cooperativity_for(C, emitter):
    return effective_cooperativity(C, emitter.t1_optical, emitter.t2_optical)


def rvp_gate_time(c_eff, gamma, delta_over_rabi):
    """T_RVP = (Δ/Ω)² T_VP(C_eff)."""
    if not delta_over_rabi >= 1:
        raise ParameterDomainError(
            f"Δ/Ω must be >= 1, got {delta_over_rabi}", path="scheme.raman_rabi"
        )
    return delta_over_rabi**2 * vp_gate_time(c_eff, gamma)


def rvp_fidelity(cfg, c_eff, emitter, t_rvp, clamp=True):
    """Upper bound on the Raman-scheme fidelity.

    Γ is the shelving-level decoherence: ``cfg.shelving_decoherence`` when
    set, otherwise the electron spin 1/T2e.
    """
    _check_positive(c_eff, "c_eff")
    if cfg.delta_eps:
        if not cfg.cavity_detuning:
            raise ParameterDomainError(
                "needed when delta_eps is non-zero", path="scheme.cavity_detuning"
            )
        detuning_error = (cfg.delta_eps / cfg.cavity_detuning) ** 2
    else:
        detuning_error = 0.0

    decoherence = cfg.shelving_decoherence
    if decoherence is None:
        decoherence = emitter.spin_decoherence

    spectral = (t_rvp * cfg.two_photon_error / (2 * np.pi)) ** 2 + detuning_error - 18 / c_eff
    raw = 1 - 2 * np.pi / np.sqrt(c_eff) - decoherence * t_rvp - np.pi**2 / 8 * spectral
    return float(np.clip(raw, 0, 1)) if clamp else float(raw)


def vp_guards(preset, t_vp):
    flags = []
    if t_vp > preset.emitter.t1_optical:
        warn_once("exchange", "VP gate time exceeds the optical lifetime T1h")
        flags.append("gate_slower_than_t1h")
    if preset.g_over_kappa is not None and preset.g_over_kappa > 1:
        warn_once("exchange", "g/κ > 1: outside the bad-cavity regime")
        flags.append("strong_coupling")
    return merge_flags(flags)


def evaluate_vp(preset):
    cfg = ExchangeConfig.from_preset(preset)
    C = preset.cavity.cooperativity
    t_vp = vp_gate_time(C, preset.emitter.gamma)
    return GateMetrics.from_raw(
        fidelity=vp_fidelity(cfg, C, preset.emitter, t_vp, clamp=False),
        efficiency=1.0,
        gate_time=t_vp,
        flags=vp_guards(preset, t_vp),
    )


def evaluate_rvp(preset):
    cfg = ExchangeConfig.from_preset(preset)
    if cfg.cavity_detuning is None or cfg.rabi is None:
        raise ParameterDomainError(
            "set both scheme.cavity_detuning and scheme.raman_rabi", path="scheme.raman_rabi"
        )
    c_eff = effective_cooperativity_for(preset.cavity.cooperativity, preset.emitter)
    t_rvp = rvp_gate_time(c_eff, preset.emitter.gamma, cfg.delta_over_rabi)
    return GateMetrics.from_raw(
        fidelity=rvp_fidelity(cfg, c_eff, preset.emitter, t_rvp, clamp=False),
        efficiency=1.0,
        gate_time=t_rvp,
    )
