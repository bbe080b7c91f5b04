from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .custom_exceptions import NumericalFailure, ParameterDomainError

# Coarse scan that picks the cell handed to the bounded search.
GRID_POINTS = 17


class Optimum(NamedTuple):
    argmax: float
    value: float
    unbounded: bool = False
    evaluations: int = 0


def golden_section_max(objective, bracket, tol=1e-9, max_iter=200, atol=0.0):
    """Maximize a unimodal scalar function on a finite interval.

    A coarse scan locates the best cell, and scipy's bounded search
    (golden-section steps with parabolic interpolation) refines inside it.

    Parameters
    ----------
    objective : callable
        float -> float.
    bracket : (float, float)
        Finite search interval ``(lo, hi)`` with ``lo < hi``.
    tol : float
        Relative tolerance on the argmax.
    max_iter : int
        Iterations of the bounded search before giving up with
        `NumericalFailure`.
    atol : float
        Absolute tolerance, needed when the maximum sits at zero.

    Returns
    -------
    Optimum
        `unbounded` is set when no interior point beats an end of the
        bracket, i.e. the maximum is at (or beyond) the boundary; `argmax`
        is then that endpoint.
    """
    lo, hi = (float(x) for x in bracket)
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo >= hi:
        raise ParameterDomainError(f"invalid bracket ({lo}, {hi})")

    grid = np.linspace(lo, hi, GRID_POINTS)
    values = np.array([objective(x) for x in grid], dtype=float)
    if np.isnan(values).any():
        raise NumericalFailure("objective returned NaN on the search grid")
    k = int(np.argmax(values))
    cell = (grid[max(k - 1, 0)], grid[min(k + 1, GRID_POINTS - 1)])

    res = minimize_scalar(
        lambda x: -objective(x),
        bounds=cell,
        method="bounded",
        options={"xatol": tol * abs(grid[k]) + atol, "maxiter": max_iter},
    )
    if not res.success:
        raise NumericalFailure(
            f"bounded search did not converge in {max_iter} iterations "
            f"(cell [{cell[0]:.6g}, {cell[1]:.6g}]): {res.message}"
        )
    evaluations = GRID_POINTS + int(res.nfev)

    if k in (0, GRID_POINTS - 1) and values[k] >= -res.fun:
        return Optimum(float(grid[k]), float(values[k]), True, evaluations)
    return Optimum(float(res.x), float(-res.fun), False, evaluations)
