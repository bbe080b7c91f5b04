"""Cavity-assisted photon scattering (SB) gate.

A single photon of spectral width σ_p is reflected off the two
emitter-cavity systems in turn.  The fidelity is a perturbative expansion
in 1/C and in the detunings; it becomes meaningless (and negative) at
small cooperativity, which is why `sb_fidelity` and `sb_efficiency`
clamp by default.
"""

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .custom_exceptions import ConfigError, ParameterDomainError
from .log import warn_once
from .metrics import GateMetrics, clamp_unit, merge_flags
from .optimize import golden_section_max

# T_SB = FWHM_FACTOR/σ_p: twice the photon FWHM in time.
FWHM_FACTOR = 8 * np.pi * np.sqrt(2 * np.log(2))


@dataclass(frozen=True)
class ScatteringConfig:
    sigma_p: float = None
    delta_p: float = 0.0
    delta_eps_a: float = 0.0
    delta_eps_b: float = 0.0
    g_over_kappa: float = 0.008

    def __post_init__(self):
        if self.sigma_p is not None and not self.sigma_p > 0:
            raise ParameterDomainError(f"must be > 0, got {self.sigma_p}", path="scheme.sigma_p")
        if not self.g_over_kappa >= 0:
            raise ParameterDomainError("must be >= 0", path="cavity.g_over_kappa")

    @classmethod
    def from_preset(cls, preset):
        knobs = preset.scheme
        return cls(
            sigma_p=knobs.get("sigma_p"),
            delta_p=knobs.get("delta_p") or 0.0,
            delta_eps_a=knobs.get("delta_eps_a") or 0.0,
            delta_eps_b=knobs.get("delta_eps_b") or 0.0,
            g_over_kappa=preset.g_over_kappa,
        )


class SigmaOptimum(NamedTuple):
    sigma_p: float
    fidelity: float
    unbounded: bool = False


def _check_cooperativity(C):
    if not C > 0:
        raise ParameterDomainError(f"must be > 0, got {C}", path="cavity.cooperativity")


def spectral_bracket(g_over_kappa):
    """11 − 20x² + 12x⁴ with x = 2g/κ."""
    x2 = (2 * g_over_kappa) ** 2
    return 11 - 20 * x2 + 12 * x2**2


def sb_gate_time(sigma_p):
    if not sigma_p > 0:
        raise ParameterDomainError(f"must be > 0, got {sigma_p}", path="scheme.sigma_p")
    return FWHM_FACTOR / sigma_p


def sb_efficiency(cfg, C, emitter, det, clamp=True):
    """η_SB = (1 − 5/(2C) − (δ_εA − δ_εB)²/(2γ²C))·η_d."""
    _check_cooperativity(C)
    mismatch = cfg.delta_eps_a - cfg.delta_eps_b
    scattered = 1 - 5 / (2 * C)
    if mismatch:
        scattered -= mismatch**2 / (2 * emitter.gamma**2 * C)
    raw = scattered * det.eta_d
    return clamp_unit(raw, "efficiency")[0] if clamp else raw


def sb_infidelity(cfg, C, emitter):
    """Sum of the error terms of the SB fidelity expansion."""
    _check_cooperativity(C)
    if cfg.sigma_p is None:
        raise ConfigError("no photon bandwidth set", path="scheme.sigma_p")

    gamma = emitter.gamma
    x2 = (2 * cfg.g_over_kappa) ** 2
    dA, dB, dp = cfg.delta_eps_a, cfg.delta_eps_b, cfg.delta_p
    scale = 4 * gamma**2 * C**2

    decoherence = emitter.spin_decoherence
    if decoherence > 0:
        storage = decoherence * sb_gate_time(cfg.sigma_p)
    else:
        storage = 0.0

    return (
        11 * emitter.gamma_star / (8 * gamma * C)
        + 11 / (16 * C**2)
        + storage
        + (-11 + 10 * x2) * dp * (dA + dB) / scale
        + (41 * dA**2 - 38 * dA * dB + 41 * dB**2) / (4 * scale)
        + spectral_bracket(cfg.g_over_kappa) * (dp**2 + cfg.sigma_p**2) / scale
    )


def sb_fidelity(cfg, C, emitter, clamp=True):
    raw = 1 - sb_infidelity(cfg, C, emitter)
    return clamp_unit(raw, "fidelity")[0] if clamp else raw


def sb_sigma_opt_closed(C, emitter, g_over_kappa):
    """Photon bandwidth that balances the storage and bandwidth errors.

    σ_p = 2·∛(4π√(2 ln 2)·Γγ²C² / (11 − 20x² + 12x⁴)), x = 2g/κ.
    Returns 0 when Γ = 0.
    """
    _check_cooperativity(C)
    bracket = spectral_bracket(g_over_kappa)
    if not bracket > 0:
        raise ParameterDomainError(
            f"spectral bracket {bracket} is not positive", path="cavity.g_over_kappa"
        )

    decoherence = emitter.spin_decoherence
    if decoherence == 0:
        warn_once("scattering", "no spin decoherence: optimal photon bandwidth is 0")
        return 0.0

    numerator = 4 * np.pi * np.sqrt(2 * np.log(2)) * decoherence * emitter.gamma**2 * C**2
    return float(2 * np.cbrt(numerator / bracket))


def sb_sigma_opt_numeric(C, emitter, cfg, decades=2.0, tol=1e-9, max_iter=200):
    """Maximize the SB fidelity over σ_p with `golden_section_max`.

    The search runs over ln(σ_p/σ_closed), `decades` decades either side
    of the closed-form value.  The result is never worse than the closed form.

    Returns
    -------
    SigmaOptimum
        Raw (unclamped) fidelity at the returned σ_p.
    """
    if decades < 2:
        raise ParameterDomainError("search must span at least 4 decades", path="decades")

    closed = sb_sigma_opt_closed(C, emitter, cfg.g_over_kappa)
    if closed == 0:
        raise ParameterDomainError(
            "no interior optimum without spin decoherence", path="emitter.t2_spin"
        )

    def at(log_ratio):
        return replace(cfg, sigma_p=float(closed * np.exp(log_ratio)))

    # Infidelity keeps full precision near the optimum, where F is close to 1.
    def objective(log_ratio):
        return -sb_infidelity(at(log_ratio), C, emitter)

    span = decades * np.log(10)
    optimum = golden_section_max(objective, (-span, span), tol=0.0, atol=tol, max_iter=max_iter)

    closed_fidelity = sb_fidelity(at(0.0), C, emitter, clamp=False)
    found = at(optimum.argmax)
    found_fidelity = sb_fidelity(found, C, emitter, clamp=False)
    if closed_fidelity > found_fidelity:
        return SigmaOptimum(closed, closed_fidelity, optimum.unbounded)
    return SigmaOptimum(found.sigma_p, found_fidelity, optimum.unbounded)


def evaluate_sb(preset):
    """SB metrics at the preset's cooperativity.

    ``scheme.sigma_mode`` selects the photon bandwidth: ``closed`` (default),
    ``numeric`` or ``fixed`` (``scheme.sigma_p``).
    """
    cfg = ScatteringConfig.from_preset(preset)
    C = preset.cavity.cooperativity
    emitter = preset.emitter
    mode = preset.scheme.get("sigma_mode") or "closed"
    flags = []

    if mode == "closed":
        sigma_p = sb_sigma_opt_closed(C, emitter, cfg.g_over_kappa)
    elif mode == "numeric":
        optimum = sb_sigma_opt_numeric(C, emitter, cfg)
        sigma_p = optimum.sigma_p
        if optimum.unbounded:
            flags.append("sigma_unbounded")
    elif mode == "fixed":
        if cfg.sigma_p is None:
            raise ConfigError("sigma_mode fixed needs scheme.sigma_p", path="scheme.sigma_p")
        sigma_p = cfg.sigma_p
    else:
        raise ConfigError(f"unknown mode [{mode}]", path="scheme.sigma_mode")

    if sigma_p == 0:
        flags.append("sigma_degenerate")
        sigma_p = np.finfo(float).tiny
        gate_time = np.inf
    else:
        gate_time = sb_gate_time(sigma_p)

    cfg = replace(cfg, sigma_p=sigma_p)
    return GateMetrics.from_raw(
        fidelity=sb_fidelity(cfg, C, emitter, clamp=False),
        efficiency=sb_efficiency(cfg, C, emitter, preset.detection, clamp=False),
        gate_time=gate_time,
        flags=merge_flags(flags),
    )
