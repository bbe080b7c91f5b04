"""Physical parameters, unit conventions and scenario presets.

Rates are stored as angular frequencies (rad/s) except where a field says
otherwise; see ``config.yaml.defaults`` for the per-field unit table.
"""

import copy
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import constants

from .config import load_config
from .custom_exceptions import ConfigError, ParameterDomainError


def _check_nonnegative(owner, **values):
    for name, value in values.items():
        if value is None:
            continue
        if math.isnan(value) or value < 0:
            raise ParameterDomainError(f"must be >= 0, got {value}", path=f"{owner}.{name}")


def _check_unit_interval(owner, **values):
    for name, value in values.items():
        if not 0.0 <= value <= 1.0:
            raise ParameterDomainError(f"must lie in [0, 1], got {value}", path=f"{owner}.{name}")


@dataclass(frozen=True)
class PhysConsts:
    mu0: float = constants.mu_0
    muB: float = constants.physical_constants["Bohr magneton"][0]
    hbar: float = constants.hbar
    h: float = constants.h
    eps0: float = constants.epsilon_0

    def __post_init__(self):
        for name in ("mu0", "muB", "hbar", "h", "eps0"):
            if not getattr(self, name) > 0:
                raise ParameterDomainError("must be > 0", path=f"consts.{name}")


CONSTS = PhysConsts()

# Largest double below 1; C/(1 + C) rounds up to 1 for C above about 1e16.
EMISSION_CEILING = float(np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class EmitterParams:
    """Intrinsic T-centre rates and efficiencies.

    Spin lifetimes may be ``math.inf``; with both infinite there is no
    spin dephasing.
    """

    gamma: float
    gamma_star: float = 0.0
    t1_spin: float = math.inf
    t2_spin: float = math.inf
    eta_zpl: float = 0.23
    eta_r: float = 0.23
    g_ground: tuple = (2.01, 2.01, 2.01)
    g_excited: tuple = (3.45, 3.45, 3.45)
    hole_spin_lifetime: float = 100e-9

    def __post_init__(self):
        _check_nonnegative("emitter", gamma=self.gamma, gamma_star=self.gamma_star)
        _check_unit_interval("emitter", eta_zpl=self.eta_zpl, eta_r=self.eta_r)
        for name in ("t1_spin", "t2_spin", "hole_spin_lifetime"):
            if not getattr(self, name) > 0:
                raise ParameterDomainError("must be > 0", path=f"emitter.{name}")
        for name in ("g_ground", "g_excited"):
            if len(getattr(self, name)) != 3:
                raise ParameterDomainError("expected (g_x, g_y, g_z)", path=f"emitter.{name}")
        if self.gamma_s_star < 0:
            raise ParameterDomainError(
                "spin times give negative dephasing (need T2 <= 2 T1)",
                path="emitter.t2_spin",
            )

    @property
    def spin_decoherence(self):
        """Γ = 1/T2e."""
        return 1.0 / self.t2_spin

    @property
    def gamma_s_star(self):
        """γ*_s = 1/T2e − 1/(2 T1e)."""
        return 1.0 / self.t2_spin - 0.5 / self.t1_spin

    @property
    def gamma_zpl(self):
        return self.gamma * self.eta_r * self.eta_zpl

    @property
    def t1_optical(self):
        """T1h = 1/γ."""
        return 1.0 / self.gamma

    @property
    def t2_optical(self):
        """T2h from γ* = 1/T2h − γ/2."""
        return 1.0 / (self.gamma_star + 0.5 * self.gamma)


@dataclass(frozen=True)
class CavitySet:
    cooperativity: float
    purcell: float
    gamma_prime: float
    eta_em: float
    g_coupling: float = None
    kappa: float = None

    def __post_init__(self):
        _check_nonnegative(
            "cavity",
            cooperativity=self.cooperativity,
            purcell=self.purcell,
            gamma_prime=self.gamma_prime,
            g_coupling=self.g_coupling,
            kappa=self.kappa,
        )
        if not 0.0 <= self.eta_em < 1.0:
            raise ParameterDomainError(f"must lie in [0, 1), got {self.eta_em}", path="cavity.eta_em")

    @property
    def g_over_kappa(self):
        if self.g_coupling is None or not self.kappa:
            return None
        return self.g_coupling / self.kappa


@dataclass(frozen=True)
class DetectionChain:
    eta_d: float = 0.95
    eta_c: float = 0.9

    def __post_init__(self):
        _check_unit_interval("detection", eta_d=self.eta_d, eta_c=self.eta_c)


@dataclass(frozen=True)
class ScenarioPreset:
    """A fully resolved parameter set.

    `scheme` holds the converted scheme knobs keyed by their config name;
    `source` is the parameter tree the preset was built from, kept so that
    sweeps can rebuild the preset with one field changed.
    """

    name: str
    emitter: EmitterParams
    cavity: CavitySet
    detection: DetectionChain
    delta_t: float
    scheme: dict = field(default_factory=dict)
    nominal_cooperativity: float = None
    g_over_kappa: float = 0.008
    source: dict = field(default=None, repr=False, compare=False)
    units: dict = field(default=None, repr=False, compare=False)
    raw_angular: bool = False

    def __post_init__(self):
        if not self.delta_t >= 0:
            raise ParameterDomainError("must be >= 0", path="scheme.delta_t")


def derive_cavity_from_c(cooperativity, emitter):
    """Cavity quantities for a given cooperativity; g and κ stay unset."""
    C = float(cooperativity)
    if not C >= 0:
        raise ParameterDomainError(f"must be >= 0, got {C}", path="cavity.cooperativity")
    if not emitter.gamma > 0:
        raise ParameterDomainError("must be > 0", path="emitter.gamma")

    zpl_fraction = emitter.eta_r * emitter.eta_zpl
    if C > 0 and zpl_fraction == 0:
        raise ParameterDomainError(
            "a cavity needs eta_r * eta_zpl > 0", path="emitter.eta_zpl"
        )

    return CavitySet(
        cooperativity=C,
        purcell=C / zpl_fraction if C > 0 else 0.0,
        gamma_prime=emitter.gamma * (1.0 + C),
        eta_em=min(C / (1.0 + C), EMISSION_CEILING),
    )


def derive_cavity(g, kappa, emitter):
    """Cavity quantities from the coupling g and cavity decay κ (both rad/s).

    C = 4g²/(κγ), F_p = C/(η_r η_zpl), γ′ = γ(1 + C).
    """
    if not g >= 0:
        raise ParameterDomainError(f"must be >= 0, got {g}", path="cavity.g_coupling")
    if not kappa > 0:
        raise ParameterDomainError(f"must be > 0, got {kappa}", path="cavity.kappa")
    if not emitter.gamma > 0:
        raise ParameterDomainError("must be > 0", path="emitter.gamma")

    C = 4.0 * g**2 / (kappa * emitter.gamma)
    return replace(derive_cavity_from_c(C, emitter), g_coupling=float(g), kappa=float(kappa))


def eta_prime(cavity, det):
    """Overall photon detection probability η′ = η_d η_c η_em."""
    return det.eta_d * det.eta_c * cavity.eta_em


def _convert(cfg, units, path, raw_angular):
    value = cfg[path]
    if value is None:
        return None
    if isinstance(value, bool):
        raise ConfigError("expected a number, got a boolean", path=path)
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a number, got [{value}]", path=path)
    if units.get(path) and not raw_angular:
        value *= 2 * np.pi
    return value


def _lifetime(cfg, units, path, raw_angular):
    value = _convert(cfg, units, path, raw_angular)
    return math.inf if value is None else value


def _scheme_knobs(cfg, units, raw_angular):
    knobs = {}
    for key, value in cfg["scheme"].items():
        path = f"scheme.{key}"
        if isinstance(value, (bool, str)):
            knobs[key] = value
        elif isinstance(value, (list, tuple)):
            try:
                knobs[key] = tuple(float(v) for v in value)
            except (TypeError, ValueError):
                raise ConfigError(f"expected numbers, got {value}", path=path)
        else:
            knobs[key] = _convert(cfg, units, path, raw_angular)
    return knobs


def build_preset(cfg, units, name="custom", raw_angular=False):
    """Resolve a parameter tree into a validated `ScenarioPreset`.

    When ``emitter.gamma`` is null the bare decay rate is taken from the
    scenario mapping γ = γ′/(1 + F_p η_r η_zpl).  The cavity is then built
    from, in order of preference, an explicit cooperativity, g and κ, or
    the Purcell factor.
    """

    def number(path):
        return _convert(cfg, units, path, raw_angular)

    eta_zpl = number("emitter.eta_zpl")
    eta_r = number("emitter.eta_r")
    purcell = number("cavity.purcell")
    scenario_c = purcell * eta_r * eta_zpl if purcell is not None else None

    gamma = number("emitter.gamma")
    if gamma is None:
        gamma_prime = number("cavity.gamma_prime")
        if gamma_prime is None or scenario_c is None:
            raise ConfigError(
                "set emitter.gamma, or both cavity.gamma_prime and cavity.purcell",
                path="emitter.gamma",
            )
        gamma = gamma_prime / (1.0 + scenario_c)

    try:
        g_ground = tuple(float(v) for v in cfg["emitter.g_ground"])
        g_excited = tuple(float(v) for v in cfg["emitter.g_excited"])
    except (TypeError, ValueError):
        raise ConfigError("expected three g-factors", path="emitter.g_ground")

    emitter = EmitterParams(
        gamma=gamma,
        gamma_star=number("emitter.gamma_star") or 0.0,
        t1_spin=_lifetime(cfg, units, "emitter.t1_spin", raw_angular),
        t2_spin=_lifetime(cfg, units, "emitter.t2_spin", raw_angular),
        eta_zpl=eta_zpl,
        eta_r=eta_r,
        g_ground=g_ground,
        g_excited=g_excited,
        hole_spin_lifetime=_lifetime(cfg, units, "emitter.hole_spin_lifetime", raw_angular),
    )

    cooperativity = number("cavity.cooperativity")
    g_coupling = number("cavity.g_coupling")
    kappa = number("cavity.kappa")
    if cooperativity is not None:
        cavity = derive_cavity_from_c(cooperativity, emitter)
    elif g_coupling is not None and kappa is not None:
        cavity = derive_cavity(g_coupling, kappa, emitter)
    elif scenario_c is not None:
        cavity = derive_cavity_from_c(scenario_c, emitter)
    else:
        raise ConfigError(
            "set cavity.cooperativity, cavity.g_coupling and cavity.kappa, or cavity.purcell",
            path="cavity",
        )

    g_over_kappa = cavity.g_over_kappa
    if g_over_kappa is None:
        g_over_kappa = number("cavity.g_over_kappa")

    detection = DetectionChain(
        eta_d=number("detection.eta_d"),
        eta_c=number("detection.eta_c"),
    )

    scheme = _scheme_knobs(cfg, units, raw_angular)
    return ScenarioPreset(
        name=name,
        emitter=emitter,
        cavity=cavity,
        detection=detection,
        delta_t=scheme["delta_t"],
        scheme=scheme,
        nominal_cooperativity=number("cavity.nominal_cooperativity"),
        g_over_kappa=g_over_kappa,
        source=copy.deepcopy(cfg),
        units=dict(units),
        raw_angular=raw_angular,
    )


def rebuild(preset, overrides):
    """Rebuild `preset` from its source tree with ``{path: value}`` changes."""
    cfg = preset.source.copy()
    for path, value in overrides.items():
        cfg[path] = value
    return build_preset(cfg, preset.units, name=preset.name, raw_angular=preset.raw_angular)


def load_preset(source="scenario1", overrides=(), raw_angular=False):
    """Load a preset name or config file and build the `ScenarioPreset`."""
    cfg, units, name = load_config(source, overrides)
    return build_preset(cfg, units, name=name, raw_angular=raw_angular)
