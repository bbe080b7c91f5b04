"""Deterministic proximity gates between nearby T centres.

The magnetic dipole gate (MDG in the ground manifold, MDE in the excited
manifold) moves passive qubits into magnetically active levels, lets the
Ising σ_zσ_z coupling imprint a conditional phase, and maps back.  The
electric dipole gate (ED) uses the optical line shift one centre's
excitation induces on its neighbour.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .custom_exceptions import ParameterDomainError
from .log import warn_once
from .metrics import GateMetrics, merge_flags
from .params import CONSTS

# Amplitude coefficient of the transverse coupling error; its square sets the
# second-order infidelity, so isotropic g costs a² ≈ 0.019.
TRANSVERSE_COEFFICIENT = (32 * (2 - np.sqrt(2)) - np.pi**2) / 64

# Coefficient of the (δν/Δν)² term in the ED fidelity.
ED_DETUNING_COEFFICIENT = 43 * np.pi**2 / 128


@dataclass(frozen=True)
class DipoleConfig:
    """Magnetic dipole gate settings.

    `rabi` and `splitting` are used numerically as quoted (no 2π), so that
    T_act = π/Ω reproduces 4.49 μs for Ω = 0.7 MHz.
    """

    distance: float
    rabi: float
    splitting: float
    g_par: float
    g_perp: float
    branching: tuple = (0.9, 0.1)
    transverse_coefficient: float = TRANSVERSE_COEFFICIENT

    def __post_init__(self):
        if not self.distance > 0:
            raise ParameterDomainError(f"must be > 0, got {self.distance}", path="scheme.distance")
        if not self.rabi > 0:
            raise ParameterDomainError(f"must be > 0, got {self.rabi}", path="scheme.rabi")
        if not self.splitting >= 0:
            raise ParameterDomainError("must be >= 0", path="scheme.splitting")
        if len(self.branching) != 2 or min(self.branching) < 0 or sum(self.branching) > 1 + 1e-12:
            raise ParameterDomainError(
                "expected two non-negative fractions summing to at most 1",
                path="scheme.branching",
            )


@dataclass(frozen=True)
class DipoleRates:
    """Decay and dephasing rates entering the magnetic dipole gate fidelity (1/s)."""

    gamma_1_up: float = 0.0
    gamma_1_dn: float = 0.0
    gamma_2: float = 0.0
    gamma_3: float = 0.0
    gamma_4: float = 0.0
    gamma_5: float = 0.0

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value >= 0:
                raise ParameterDomainError(f"must be >= 0, got {value}", path=f"rates.{name}")

    @classmethod
    def from_branching(cls, decay, branching, **rates):
        """Split an active→passive decay rate into γ_1↑ and γ_1↓."""
        up, dn = branching
        return cls(gamma_1_up=up * decay, gamma_1_dn=dn * decay, **rates)


class Couplings(NamedTuple):
    j_z: float
    j_x: float
    j_y: float


class MdTimes(NamedTuple):
    t_act: float
    t_int: float
    total: float


def dipolar_coupling(cfg, consts=CONSTS):
    """Ising coupling energies (J).

    J_z = μ0(μB g_z)²/(8πr³); J_{x,y} = μ0(μB g_⊥)²/(16πr³).
    """
    r3 = cfg.distance**3
    j_z = consts.mu0 * (consts.muB * cfg.g_par) ** 2 / (8 * np.pi * r3)
    j_perp = consts.mu0 * (consts.muB * cfg.g_perp) ** 2 / (16 * np.pi * r3)
    return Couplings(j_z, j_perp, j_perp)


def md_times(cfg, j_z, consts=CONSTS):
    """Activation time π/Ω, interaction time ħπ/(4J_z) and the total 2T_act + T_int."""
    if not j_z > 0:
        raise ParameterDomainError(f"must be > 0, got {j_z}", path="j_z")
    t_act = np.pi / cfg.rabi
    t_int = consts.hbar * np.pi / (4 * j_z)
    return MdTimes(t_act, t_int, 2 * t_act + t_int)


def md_fidelity(rates, times, couplings, coefficient=TRANSVERSE_COEFFICIENT, clamp=True):
    """First-order decay/dephasing errors plus the transverse coupling error.

    The transverse term is [a(J_x + J_y)/J_z]², which is about 0.02 for
    isotropic g where J_x + J_y = J_z.
    """
    j_z, j_x, j_y = couplings
    if not j_z > 0:
        raise ParameterDomainError(f"must be > 0, got {j_z}", path="j_z")

    r = rates
    during_activation = times.t_act * (
        7 / 8 * (r.gamma_1_up + r.gamma_1_dn)
        + 13 / 16 * (r.gamma_2 + r.gamma_3)
        + 1 / 2 * (r.gamma_4 + r.gamma_5)
    )
    during_interaction = times.t_int * (
        r.gamma_1_up + r.gamma_1_dn + 3 / 4 * r.gamma_3 + 1 / 2 * r.gamma_5
    )
    transverse = (coefficient * (j_x + j_y) / j_z) ** 2

    raw = 1 - during_activation - during_interaction - transverse
    return float(np.clip(raw, 0, 1)) if clamp else float(raw)


def offresonant_infidelity(rabi, splitting):
    """(π/2)² exp[−(π/2)(Δ/Ω)²] from driving a neighbouring transition."""
    if not rabi > 0:
        raise ParameterDomainError(f"must be > 0, got {rabi}", path="scheme.rabi")
    return float((np.pi / 2) ** 2 * np.exp(-np.pi / 2 * (splitting / rabi) ** 2))


def _transverse_coefficient(preset):
    coefficient = preset.scheme.get("transverse_coefficient")
    return TRANSVERSE_COEFFICIENT if coefficient is None else coefficient


def mdg_config(preset, distance=None):
    """Ground-manifold gate: nuclear-spin passive qubits, electron-spin active qubits."""
    knobs = preset.scheme
    g_x, g_y, g_z = preset.emitter.g_ground
    return DipoleConfig(
        distance=knobs["distance"] if distance is None else distance,
        rabi=knobs["rabi"],
        splitting=knobs["splitting"],
        g_par=g_z,
        g_perp=0.5 * (g_x + g_y),
        branching=knobs.get("branching") or (0.9, 0.1),
        transverse_coefficient=_transverse_coefficient(preset),
    )


def mde_config(preset, distance=None):
    """Excited-manifold gate: electron-spin passive qubits, hole-spin active qubits."""
    knobs = preset.scheme
    g_x, g_y, g_z = preset.emitter.g_excited
    return DipoleConfig(
        distance=knobs["distance"] if distance is None else distance,
        rabi=knobs["mde_rabi"],
        splitting=knobs["mde_splitting"],
        g_par=g_z,
        g_perp=0.5 * (g_x + g_y),
        branching=knobs.get("branching") or (0.9, 0.1),
        transverse_coefficient=_transverse_coefficient(preset),
    )


def mdg_rates(emitter, cfg, nuclear_decay=0.0, nuclear_dephasing=0.0):
    """Electron-spin lifetimes drive the active qubits; nuclear rates the passive ones.

    The active qubits are ground-state electron spins, so the 90/10
    branching splits the spin relaxation rate 1/T1e, not the optical
    decay 1/T1h.  The optical rate only applies to the excited-manifold
    gate (`mde_rates`).
    """
    if not (nuclear_decay or nuclear_dephasing):
        warn_once("dipole", "nuclear spin decay and dephasing not set; using 0")
    electron_decay = 1.0 / emitter.t1_spin
    return DipoleRates.from_branching(
        electron_decay,
        cfg.branching,
        gamma_2=nuclear_decay,
        gamma_3=electron_decay,
        gamma_4=nuclear_dephasing,
        gamma_5=emitter.gamma_s_star,
    )


def mde_rates(emitter, cfg):
    """Optical decay returns the active hole spins to the passive electron spins.

    The hole-spin dephasing rate has not been measured and is left out.
    """
    warn_once("dipole", "hole spin dephasing (gamma_5) unknown; excluded from MDE fidelity")
    return DipoleRates.from_branching(
        emitter.gamma,
        cfg.branching,
        gamma_2=1.0 / emitter.t1_spin,
        gamma_3=1.0 / emitter.hole_spin_lifetime,
        gamma_4=emitter.gamma_s_star,
    )


def _evaluate_md(cfg, rates, consts):
    couplings = dipolar_coupling(cfg, consts)
    times = md_times(cfg, couplings.j_z, consts)
    raw = md_fidelity(rates, times, couplings, cfg.transverse_coefficient, clamp=False)
    raw -= offresonant_infidelity(cfg.rabi, cfg.splitting)
    return GateMetrics.from_raw(fidelity=raw, efficiency=1.0, gate_time=times.total)


def evaluate_mdg(preset, consts=CONSTS):
    cfg = mdg_config(preset)
    rates = mdg_rates(
        preset.emitter,
        cfg,
        nuclear_decay=preset.scheme.get("nuclear_decay") or 0.0,
        nuclear_dephasing=preset.scheme.get("nuclear_dephasing") or 0.0,
    )
    return _evaluate_md(cfg, rates, consts)


def evaluate_mde(preset, consts=CONSTS):
    cfg = mde_config(preset)
    return _evaluate_md(cfg, mde_rates(preset.emitter, cfg), consts)


@dataclass(frozen=True)
class EdConfig:
    """Electric dipole gate settings.

    `rabi_control` and the line shift are used as quoted unless `angular`
    is set, in which case Δν is multiplied by 2π in the gate time.
    """

    delta_mu: float = 49e-31
    refractive_index: float = 3.45
    orientation_factor: float = 1.0
    rabi_control: float = 562.5e6
    delta_nu_error: float = 0.0
    angular: bool = False

    def __post_init__(self):
        if not self.refractive_index > 0:
            raise ParameterDomainError("must be > 0", path="scheme.refractive_index")
        if abs(self.orientation_factor) > 2:
            raise ParameterDomainError(
                f"|orientation factor| must be <= 2, got {self.orientation_factor}",
                path="scheme.orientation_factor",
            )
        if not self.rabi_control > 0:
            raise ParameterDomainError("must be > 0", path="scheme.rabi_control")

    @property
    def dielectric_constant(self):
        return self.refractive_index**2

    @classmethod
    def from_preset(cls, preset):
        knobs = preset.scheme
        return cls(
            delta_mu=knobs["delta_mu"],
            refractive_index=knobs["refractive_index"],
            orientation_factor=knobs["orientation_factor"],
            rabi_control=knobs["rabi_control"],
            delta_nu_error=knobs.get("delta_nu_error") or 0.0,
            angular=bool(knobs.get("delta_nu_angular")),
        )


def ed_frequency_shift(cfg, r, consts=CONSTS):
    """Signed line shift Δν (Hz) caused by the neighbour's dipole change."""
    if not r > 0:
        raise ParameterDomainError(f"must be > 0, got {r}", path="scheme.distance")
    return float(
        cfg.delta_mu**2
        * cfg.orientation_factor
        / (4 * np.pi * cfg.dielectric_constant * consts.eps0 * consts.h * r**3)
    )


def distance_for_shift(cfg, shift, consts=CONSTS):
    """Separation at which |Δν| equals `shift` (Hz)."""
    if not shift > 0:
        raise ParameterDomainError(f"must be > 0, got {shift}", path="shift")
    if cfg.orientation_factor == 0:
        raise ParameterDomainError("no shift at the magic angle", path="scheme.orientation_factor")
    unit_shift = ed_frequency_shift(cfg, 1.0, consts)
    return float(np.cbrt(abs(unit_shift) / shift))


def ed_gate_time(cfg, delta_nu):
    """T_ED = 2π/Ω_c + 3π√3/Δν, using the effective 2π pulse on the target."""
    if not delta_nu > 0:
        raise ParameterDomainError(f"must be > 0, got {delta_nu}", path="delta_nu")
    if cfg.angular:
        delta_nu = 2 * np.pi * delta_nu
    return float(2 * np.pi / cfg.rabi_control + 3 * np.pi * np.sqrt(3) / delta_nu)


def ed_fidelity(emitter, t_ed, delta_nu, delta_nu_error=0.0, clamp=True):
    """F_ED = 1 − (T_ED/80)(42γ + 25γ* + 25χ) − (43π²/128)(δν/Δν)², χ = 1/T2e."""
    if not delta_nu > 0:
        raise ParameterDomainError(f"must be > 0, got {delta_nu}", path="delta_nu")
    decoherence = (
        42 * emitter.gamma + 25 * emitter.gamma_star + 25 * emitter.spin_decoherence
    )
    raw = 1 - t_ed / 80 * decoherence - ED_DETUNING_COEFFICIENT * (delta_nu_error / delta_nu) ** 2
    return float(np.clip(raw, 0, 1)) if clamp else float(raw)


def evaluate_ed(preset, consts=CONSTS):
    cfg = EdConfig.from_preset(preset)
    shift = abs(ed_frequency_shift(cfg, preset.scheme["distance"], consts))
    if shift == 0:
        raise ParameterDomainError("no shift at the magic angle", path="scheme.orientation_factor")
    t_ed = ed_gate_time(cfg, shift)
    raw = ed_fidelity(preset.emitter, t_ed, shift, cfg.delta_nu_error, clamp=False)

    flags = []
    if t_ed > preset.emitter.t1_optical:
        flags.append("gate_slower_than_t1h")
    return GateMetrics.from_raw(
        fidelity=raw, efficiency=1.0, gate_time=t_ed, flags=merge_flags(flags)
    )
