"""Parameter sweeps, comparisons and single-parameter optimization.

Every sweep point rebuilds the preset from its source tree with the swept
path(s) changed, then calls the scheme evaluator.  Points are independent,
so they can be evaluated by dask in threads or on a `distributed` cluster;
results are always gathered in grid order.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import dask
import numpy as np

from . import dipole, exchange, interference, scattering
from .config import resolve_path
from .custom_exceptions import ConfigError, ParameterDomainError
from .log import make_log
from .optimize import Optimum, golden_section_max
from .params import rebuild

__all__ = [
    "EVALUATORS",
    "SCHEMES",
    "CompareTable",
    "SweepRange",
    "SweepResult",
    "SweepRow",
    "SweepSpec",
    "compare_schemes",
    "evaluate",
    "golden_section_max",
    "optimize_parameter",
    "run_sweep",
]

log = make_log("sweep")

EVALUATORS = {
    "ib": interference.evaluate_ib,
    "ibf": interference.evaluate_ibf,
    "sb": scattering.evaluate_sb,
    "mdg": dipole.evaluate_mdg,
    "mde": dipole.evaluate_mde,
    "ed": dipole.evaluate_ed,
    "vp": exchange.evaluate_vp,
    "rvp": exchange.evaluate_rvp,
}
SCHEMES = tuple(EVALUATORS)

_EMITTER = ("emitter.",)
_CAVITY = ("cavity.",)
_INTERFERENCE = _EMITTER + _CAVITY + ("detection.", "scheme.detection_time", "scheme.delta_t")

# Config paths (or path prefixes) each evaluator reads.
SCHEME_INPUTS = {
    "ib": _INTERFERENCE,
    "ibf": _INTERFERENCE + ("scheme.delta", "scheme.phi_init", "scheme.phi_prop"),
    "sb": _EMITTER
    + _CAVITY
    + (
        "detection.eta_d",
        "scheme.sigma_p",
        "scheme.sigma_mode",
        "scheme.delta_p",
        "scheme.delta_eps_a",
        "scheme.delta_eps_b",
    ),
    "mdg": _EMITTER
    + (
        "scheme.distance",
        "scheme.rabi",
        "scheme.splitting",
        "scheme.branching",
        "scheme.nuclear_decay",
        "scheme.nuclear_dephasing",
        "scheme.transverse_coefficient",
    ),
    "mde": _EMITTER
    + (
        "scheme.distance",
        "scheme.mde_rabi",
        "scheme.mde_splitting",
        "scheme.branching",
        "scheme.transverse_coefficient",
    ),
    "ed": _EMITTER
    + (
        "scheme.distance",
        "scheme.delta_mu",
        "scheme.refractive_index",
        "scheme.orientation_factor",
        "scheme.rabi_control",
        "scheme.delta_nu_error",
        "scheme.delta_nu_angular",
    ),
    "vp": _EMITTER + _CAVITY + ("scheme.delta_eps", "scheme.delta_eg"),
    "rvp": _EMITTER
    + _CAVITY
    + (
        "scheme.delta_eps",
        "scheme.two_photon_error",
        "scheme.cavity_detuning",
        "scheme.raman_rabi",
        "scheme.shelving_decoherence",
    ),
}


def _check_scheme(scheme):
    if scheme not in EVALUATORS:
        raise ConfigError(f"unknown scheme; expected one of {', '.join(SCHEMES)}", path=scheme)


def reads(scheme, path):
    """Whether `scheme`'s evaluator depends on the config `path`."""
    _check_scheme(scheme)
    for entry in SCHEME_INPUTS[scheme]:
        if entry.endswith(".") and path.startswith(entry):
            return True
        if path == entry:
            return True
    return False


@dataclass(frozen=True)
class SweepRange:
    start: float
    stop: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.points < 2:
            raise ConfigError(f"need at least 2 points, got {self.points}", path="points")
        if not self.start < self.stop:
            raise ConfigError(f"need from < to, got [{self.start}, {self.stop}]", path="from")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"unknown scale [{self.scale}]", path="scale")
        if self.scale == "log" and not self.start > 0:
            raise ConfigError("log scale needs from > 0", path="from")

    def values(self):
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class SweepSpec:
    scheme: str
    parameter: str
    range: SweepRange
    overrides: tuple = ()
    parameter2: str = None
    range2: SweepRange = None

    def __post_init__(self):
        _check_scheme(self.scheme)
        if (self.parameter2 is None) != (self.range2 is None):
            raise ConfigError("a second axis needs both a parameter and a range", path="parameter2")

    @property
    def parameters(self):
        if self.parameter2 is None:
            return (self.parameter,)
        return (self.parameter, self.parameter2)


class SweepRow(NamedTuple):
    params: tuple
    fidelity: float
    efficiency: float
    gate_time: float
    flags: tuple


@dataclass(frozen=True)
class SweepResult:
    scheme: str
    parameters: tuple
    rows: tuple = field(default=())


@dataclass(frozen=True)
class CompareTable:
    parameter: str
    values: tuple
    columns: dict
    notes: tuple = ()


def evaluate(scheme, preset):
    """Evaluate one scheme on a resolved preset."""
    _check_scheme(scheme)
    return EVALUATORS[scheme](preset)


def _apply_overrides(base, overrides):
    if not overrides:
        return base
    resolved = {resolve_path(base.source, key): value for key, value in overrides}
    return rebuild(base, resolved)


def _evaluate_point(scheme, base, point):
    metrics = evaluate(scheme, rebuild(base, dict(point)))
    return SweepRow(
        params=tuple(value for _, value in point),
        fidelity=metrics.fidelity,
        efficiency=metrics.efficiency,
        gate_time=metrics.gate_time,
        flags=metrics.flags,
    )


def _gather(scheme, base, points, workers=1, client=None):
    if client is not None:
        futures = client.map(
            _evaluate_point,
            [scheme] * len(points),
            [base] * len(points),
            points,
            pure=False,
        )
        return list(client.gather(futures))
    if workers > 1:
        tasks = [dask.delayed(_evaluate_point)(scheme, base, point) for point in points]
        return list(dask.compute(*tasks, scheduler="threads", num_workers=workers))
    return [_evaluate_point(scheme, base, point) for point in points]


def run_sweep(spec, base, workers=1, client=None):
    """Evaluate `spec.scheme` over a 1-D or 2-D grid.

    Parameters
    ----------
    spec : SweepSpec
    base : ScenarioPreset
    workers : int
        Threads to use; 1 evaluates serially.
    client : distributed.Client, optional
        Evaluate on a cluster instead of local threads.
    """
    base = _apply_overrides(base, spec.overrides)
    paths = tuple(resolve_path(base.source, p) for p in spec.parameters)

    if spec.parameter2 is None:
        points = [((paths[0], float(x)),) for x in spec.range.values()]
    else:
        points = [
            ((paths[0], float(x)), (paths[1], float(y)))
            for x in spec.range.values()
            for y in spec.range2.values()
        ]

    log(f"{spec.scheme}: {len(points)} points over {', '.join(paths)}")
    rows = _gather(spec.scheme, base, points, workers=workers, client=client)
    return SweepResult(scheme=spec.scheme, parameters=paths, rows=tuple(rows))


def compare_schemes(schemes, parameter, sweep_range, base, overrides=(), workers=1, client=None):
    """Sweep several schemes over the same axis.

    Schemes that do not read `parameter` are skipped and a note says so.
    """
    base = _apply_overrides(base, overrides)
    path = resolve_path(base.source, parameter)
    columns = {}
    notes = []
    for scheme in schemes:
        if not reads(scheme, path):
            notes.append(f"{scheme}: does not depend on {path}; skipped")
            continue
        spec = SweepSpec(scheme=scheme, parameter=path, range=sweep_range)
        columns[scheme] = run_sweep(spec, base, workers=workers, client=client).rows

    for note in notes:
        log(note)
    return CompareTable(
        parameter=path,
        values=tuple(float(x) for x in sweep_range.values()),
        columns=columns,
        notes=tuple(notes),
    )


def optimize_parameter(scheme, parameter, bracket, base, scale="linear", tol=1e-9, max_iter=200):
    """Maximize a scheme's fidelity over a single config path.

    With ``scale="log"`` the search runs over the logarithm of the value.

    Returns
    -------
    optimum : Optimum
        `argmax` in the parameter's own units.
    metrics : GateMetrics
        Full evaluation at the argmax.
    """
    _check_scheme(scheme)
    path = resolve_path(base.source, parameter)
    lo, hi = bracket
    if scale == "log":
        if not lo > 0:
            raise ParameterDomainError("log search needs a positive bracket", path=path)
        to_value, search = np.exp, (np.log(lo), np.log(hi))
    else:
        to_value, search = float, (lo, hi)

    def metrics_at(x):
        return evaluate(scheme, rebuild(base, {path: float(to_value(x))}))

    def objective(x):
        metrics = metrics_at(x)
        return metrics.raw_fidelity if metrics.raw_fidelity is not None else metrics.fidelity

    found = golden_section_max(objective, search, tol=tol, max_iter=max_iter, atol=tol)
    argmax = float(to_value(found.argmax))
    if found.unbounded:
        log(f"{scheme}: optimum of {path} at the bracket edge {argmax:.6g}")
    return Optimum(argmax, found.value, found.unbounded, found.evaluations), metrics_at(found.argmax)
