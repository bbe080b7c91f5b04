"""Photon-count decomposition of the two-emitter master equation.

Each emitter is a three-level system {↑, ↓, e} with the optical transition
e → ↓.  The cavity is adiabatically eliminated, so emission happens at the
Purcell-enhanced rate γ′ directly.  The two emission modes meet on a beam
splitter whose outputs d_± are the detected channels; everything else is
undetected loss or dephasing.

Density operators live on the 9-dimensional two-emitter space and are
vectorised row-major, so superoperators are 81×81 matrices:
vec(AρB) = (A ⊗ Bᵀ) vec(ρ).

Conditional states are unnormalised: their trace is the probability of
the detector record that produced them.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from .custom_exceptions import NumericalFailure, ParameterDomainError
from .params import eta_prime

UP, DOWN, EXCITED = 0, 1, 2
LEVELS = 3
DIM = LEVELS**2
LIOUVILLE_DIM = DIM**2

# Click in the + (left) or − (right) beam-splitter output.
LEFT, RIGHT = (1, 0), (0, 1)
DETECTOR_PATTERNS = (LEFT, RIGHT)

PSD_FLOOR = 1e-10


def _basis(level):
    ket = np.zeros(LEVELS, dtype=complex)
    ket[level] = 1.0
    return ket


IDENTITY = np.eye(LEVELS, dtype=complex)
LOWERING = np.outer(_basis(DOWN), _basis(EXCITED))
EXCITED_PROJECTOR = np.outer(_basis(EXCITED), _basis(EXCITED))
SPIN_Z = np.diag([1.0, -1.0, 0.0]).astype(complex)
SPIN_FLIP = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)
OPTICAL_PI = np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=complex)


def on_emitter(op, which):
    """Embed a single-emitter operator on emitter 0 (A) or 1 (B)."""
    return np.kron(op, IDENTITY) if which == 0 else np.kron(IDENTITY, op)


def product_ket(a, b):
    return np.kron(_basis(a), _basis(b))


@dataclass(frozen=True)
class Superoperator:
    matrix: np.ndarray

    def __post_init__(self):
        n, m = self.matrix.shape
        if n != m:
            raise ParameterDomainError(f"superoperator must be square, got {self.matrix.shape}")

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __add__(self, other):
        return Superoperator(self.matrix + other.matrix)

    def __sub__(self, other):
        return Superoperator(self.matrix - other.matrix)

    def apply(self, rho):
        n = rho.shape[0]
        return (self.matrix @ rho.reshape(-1)).reshape(n, n)


@dataclass(frozen=True)
class ConditionalState:
    rho: np.ndarray
    count_pattern: tuple = field(default=())

    @property
    def trace(self):
        return float(np.trace(self.rho).real)


class Liouvillian(NamedTuple):
    full: Superoperator
    no_jump: Superoperator
    detectors: tuple


class OracleResult(NamedTuple):
    efficiency: float
    fidelity: float
    states: tuple


def sandwich(c):
    """ρ ↦ cρc†."""
    return np.kron(c, c.conj())


def anticommutator_term(c):
    """ρ ↦ −½{c†c, ρ}."""
    n = c.conj().T @ c
    eye = np.eye(c.shape[0])
    return -0.5 * (np.kron(n, eye) + np.kron(eye, n.T))


def lindblad(c):
    return sandwich(c) + anticommutator_term(c)


def build_liouvillian(emitter, cavity, det):
    """Generator of the two-emitter dynamics and its detector collapse maps.

    Returns
    -------
    Liouvillian
        ``full`` is trace preserving; ``no_jump`` omits the two detected
        recycling terms, which are returned as ``detectors`` (S_+, S_−).
    """
    gamma_prime = cavity.gamma_prime
    eta = eta_prime(cavity, det)
    s_a, s_b = on_emitter(LOWERING, 0), on_emitter(LOWERING, 1)

    detected = [
        np.sqrt(eta * gamma_prime / 2) * (s_a + s_b),
        np.sqrt(eta * gamma_prime / 2) * (s_a - s_b),
    ]
    channels = list(detected)
    for which in (0, 1):
        channels.append(np.sqrt((1 - eta) * gamma_prime) * on_emitter(LOWERING, which))
        channels.append(np.sqrt(2 * emitter.gamma_star) * on_emitter(EXCITED_PROJECTOR, which))
        channels.append(np.sqrt(emitter.gamma_s_star) * on_emitter(SPIN_Z, which))

    full = sum(lindblad(c) for c in channels)
    detectors = tuple(Superoperator(sandwich(d)) for d in detected)
    no_jump = full - sum(s.matrix for s in detectors)
    return Liouvillian(Superoperator(full), Superoperator(no_jump), detectors)


def _matrix(op):
    return op.matrix if isinstance(op, Superoperator) else np.atleast_2d(op)


def _expm(matrix):
    result = expm(matrix)
    if not np.all(np.isfinite(result)):
        raise NumericalFailure("matrix exponential did not converge")
    return result


def window_operator(no_jump, collapse, duration, propagate_to_end=False):
    """∫₀^τ [e^{L_c(τ−t)}] S e^{L_c t} dt as a matrix.

    The integral is the upper-right block of exp([[A, S], [0, L_c]]τ),
    with A = L_c when `propagate_to_end` is set and A = 0 otherwise.
    """
    L = _matrix(no_jump)
    S = _matrix(collapse)
    n = L.shape[0]
    if duration == 0:
        return np.zeros((n, n), dtype=complex)

    block = np.zeros((2 * n, 2 * n), dtype=complex)
    if propagate_to_end:
        block[:n, :n] = L
    block[:n, n:] = S
    block[n:, n:] = L
    return _expm(block * duration)[:n, n:]


def conditional_integral(no_jump, collapse, window, rho_in, propagate_to_end=False, pattern=()):
    """Unnormalised state after exactly one click of `collapse` inside `window`.

    With `propagate_to_end` unset the state is taken at the click time
    (zero emission-to-detection delay); otherwise it is carried to the
    window end under the no-jump evolution.
    """
    t_a, t_b = window
    if t_b < t_a:
        raise ParameterDomainError(f"window ends before it starts: [{t_a}, {t_b}]")
    rho_in = np.atleast_2d(np.asarray(rho_in, dtype=complex))
    W = window_operator(no_jump, collapse, t_b - t_a, propagate_to_end)
    n = rho_in.shape[0]
    return ConditionalState((W @ rho_in.reshape(-1)).reshape(n, n), tuple(pattern))


def propagate(generator, rho, duration):
    if duration == 0:
        return rho
    n = rho.shape[0]
    return (_expm(_matrix(generator) * duration) @ rho.reshape(-1)).reshape(n, n)


def _unitary(op):
    return np.kron(op, op)


def spin_flip(rho):
    """π pulse ↑ ↔ ↓ on both emitters; the excited level is untouched."""
    U = _unitary(SPIN_FLIP)
    return U @ rho @ U.conj().T


def optical_pi(rho):
    """Optical π pulse ↓ ↔ e on both emitters."""
    U = _unitary(OPTICAL_PI)
    return U @ rho @ U.conj().T


def ground_projection(rho):
    """Keep only the part of ρ with neither emitter excited."""
    P = on_emitter(IDENTITY - EXCITED_PROJECTOR, 0) @ on_emitter(IDENTITY - EXCITED_PROJECTOR, 1)
    return P @ rho @ P


def bell_state(sign):
    """(|↑↓⟩ ± |↓↑⟩)/√2."""
    return (product_ket(UP, DOWN) + sign * product_ket(DOWN, UP)) / np.sqrt(2)


def pattern_target(pattern):
    """ψ+ when both clicks came from the same detector, ψ− otherwise."""
    first, second = pattern
    return bell_state(+1 if first == second else -1)


def bell_fidelity(state):
    """Overlap of a conditional state with its target Bell state, normalised."""
    trace = state.trace
    if trace <= 0:
        return np.nan
    target = pattern_target(state.count_pattern)
    return float((target.conj() @ state.rho @ target).real / trace)


def check_state(state, floor=PSD_FLOOR):
    """Raise `NumericalFailure` unless `state` is a valid unnormalised density operator."""
    rho = state.rho
    scale = max(abs(state.trace), 1.0)
    if not np.allclose(rho, rho.conj().T, atol=floor * scale):
        raise NumericalFailure("conditional state is not Hermitian")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -floor * scale:
        raise NumericalFailure("conditional state is not positive semidefinite")
    if not -floor <= state.trace <= 1 + floor:
        raise NumericalFailure(f"conditional state trace {state.trace} outside [0, 1]")


def _two_rounds(liouvillian, cfg, rho0, between_rounds, fixed_windows=False):
    """Run both detection windows and collect the four conditional states.

    By default the second round starts at the first click.  With
    `fixed_windows` each round lasts the full T_d, so the protocol takes
    2T_d + δt whatever the click times.
    """
    T, dt = cfg.detection_time, cfg.delta_t
    no_jump = liouvillian.no_jump
    windows = [
        window_operator(no_jump, S, T, propagate_to_end=fixed_windows)
        for S in liouvillian.detectors
    ]
    between = _expm(no_jump.matrix * dt) if dt else None

    states = []
    for first, W1 in zip(DETECTOR_PATTERNS, windows):
        rho = (W1 @ rho0.reshape(-1)).reshape(DIM, DIM)
        rho = between_rounds(rho, between)
        for second, W2 in zip(DETECTOR_PATTERNS, windows):
            states.append(
                ConditionalState((W2 @ rho.reshape(-1)).reshape(DIM, DIM), (first, second))
            )

    efficiency = sum(state.trace for state in states)
    weighted = [state.trace * bell_fidelity(state) for state in states if state.trace > 0]
    fidelity = sum(weighted) / efficiency if efficiency > 0 else np.nan
    return OracleResult(float(efficiency), float(fidelity), tuple(states))


def simulate_ibf(emitter, cavity, det, cfg, liouvillian=None):
    """IBF protocol: |ee⟩, first window, spin flip, wait δt, second window."""
    liouvillian = liouvillian or build_liouvillian(emitter, cavity, det)
    excited = product_ket(EXCITED, EXCITED)
    rho0 = np.outer(excited, excited.conj())

    def between_rounds(rho, evolution):
        rho = spin_flip(rho)
        if evolution is not None:
            rho = (evolution @ rho.reshape(-1)).reshape(DIM, DIM)
        return rho

    return _two_rounds(liouvillian, cfg, rho0, between_rounds)


def simulate_ib(
    emitter,
    cavity,
    det,
    cfg,
    init_phase=0.0,
    discard_residual_excitation=True,
    fixed_windows=False,
    liouvillian=None,
):
    """IB protocol: ground superposition, optical π, first window, spin flip,
    wait δt, optical π, second window.

    Parameters
    ----------
    init_phase : float
        Phase θ of (|↑⟩ + e^{iθ}|↓⟩)/√2, common to both emitters.
    discard_residual_excitation : bool
        Drop the excited population left at the end of the first window.
        That population only arises from both emitters being excited,
        which the closed form neglects; keeping it lets a photon lost
        during δt be re-excited and herald falsely in the second round.
    fixed_windows : bool
        Run both rounds over the full T_d instead of starting the second
        at the first click.  Together with keeping the residual
        excitation this follows the protocol timing without simplifications.
    """
    liouvillian = liouvillian or build_liouvillian(emitter, cavity, det)
    plus = (_basis(UP) + np.exp(1j * init_phase) * _basis(DOWN)) / np.sqrt(2)
    psi = np.kron(plus, plus)
    rho0 = optical_pi(np.outer(psi, psi.conj()))

    def between_rounds(rho, evolution):
        if discard_residual_excitation:
            rho = ground_projection(rho)
        rho = spin_flip(rho)
        if evolution is not None:
            rho = (evolution @ rho.reshape(-1)).reshape(DIM, DIM)
        return optical_pi(rho)

    return _two_rounds(liouvillian, cfg, rho0, between_rounds, fixed_windows)


def simulate_ib_protocol(emitter, cavity, det, cfg, liouvillian=None):
    """IB with fixed windows and the doubly-excited branch kept."""
    return simulate_ib(
        emitter,
        cavity,
        det,
        cfg,
        discard_residual_excitation=False,
        fixed_windows=True,
        liouvillian=liouvillian,
    )


def swapped_detectors(liouvillian):
    """The same Liouvillian with the beam-splitter outputs exchanged."""
    plus, minus = liouvillian.detectors
    return liouvillian._replace(detectors=(minus, plus))
