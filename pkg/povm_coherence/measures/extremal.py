"""Minimal and maximal POVM coherence searches."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from core.constants.constants import Constants
from core.logging.logging import Logger
from povm_coherence.errors import ValidationError
from povm_coherence.linalg.entropy import spectrum_entropy
from povm_coherence.linalg.matrices import dagger, eigvals_hermitian
from povm_coherence.linalg.random import make_rng
from povm_coherence.linalg.states import IDENTITY_2, PAULIS, BlochVector, PureState
from povm_coherence.povm.povm import MeasurementOperators, Povm, canonical_kraus


def coherence_of_operator(m: np.ndarray, ops: MeasurementOperators) -> float:
    """
    Unvalidated evaluation of the POVM coherence for a state matrix that may carry rounding noise.

    Negative eigenvalue dust is clipped; used inside optimizers where stencil points sit on the ball boundary.
    """
    def entropy(x: np.ndarray) -> float:
        return spectrum_entropy(np.clip(eigvals_hermitian(x), 0.0, None))

    probs, branch = [], []
    for a in ops.ops:
        out = a @ m @ dagger(a)
        p = max(float(np.real(np.trace(out))), 0.0)
        probs.append(p)
        branch.append(entropy(out / p) if p > Constants.ZERO_PROB else 0.0)
    probs = np.asarray(probs) / sum(probs)
    positive = probs[probs > 0]
    outcome_entropy = float(-np.sum(positive * np.log2(positive)))
    return outcome_entropy + float(np.dot(probs, branch)) - entropy(m)


def _bloch_matrix(r: np.ndarray) -> np.ndarray:
    return (IDENTITY_2 + r[0] * PAULIS[0] + r[1] * PAULIS[1] + r[2] * PAULIS[2]) / 2


def project_to_ball(r: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(r)
    return r / n if n > 1.0 else r


def finite_difference_gradient(f: Callable[[np.ndarray], float], r: np.ndarray,
                               h: float = Constants.GRADIENT_STEP) -> np.ndarray:
    """Central differences with stencil points projected into the unit ball."""
    g = np.zeros_like(r, dtype=float)
    for k in range(r.size):
        step = np.zeros_like(r, dtype=float)
        step[k] = h
        plus, minus = project_to_ball(r + step), project_to_ball(r - step)
        span = plus[k] - minus[k]
        g[k] = (f(plus) - f(minus)) / span if span > 0 else 0.0
    return g


@dataclass(frozen=True)
class MinCoherenceResult:
    bloch: BlochVector
    value: float
    iterations: int
    gradient_norm: float
    converged: bool
    message: str = ""


@dataclass(frozen=True)
class MaxCoherenceResult:
    state: PureState
    value: float
    evaluations: int


def min_coherence_qubit(p: Povm,
                        start: Sequence[float] = (0.25, -0.15, 0.2),
                        max_iters: int = Constants.DESCENT_MAX_ITERS,
                        grad_tol: float = Constants.GRADIENT_TOL,
                        h: float = Constants.GRADIENT_STEP,
                        armijo_c: float = Constants.ARMIJO_C) -> MinCoherenceResult:
    """
    Minimize the (convex) POVM coherence over the Bloch ball by projected gradient descent.

    Stops when the projected-gradient step r - proj(r - g) is below ``grad_tol``; that covers interior
    stationary points and boundary points where the gradient points outward.
    """
    if p.dim != 2:
        raise ValidationError(f"Bloch-ball search needs a qubit POVM, got dim {p.dim}")
    ops = canonical_kraus(p)

    def f(r: np.ndarray) -> float:
        return coherence_of_operator(_bloch_matrix(r), ops)

    r = project_to_ball(np.asarray(start, dtype=float))
    f_r = f(r)
    best_r, best_f = r, f_r
    pg_norm = float("inf")
    message = ""
    it = 0

    for it in range(1, max_iters + 1):
        g = finite_difference_gradient(f, r, h)
        pg_norm = float(np.linalg.norm(r - project_to_ball(r - g)))
        if pg_norm < grad_tol:
            Logger.info(f"Minimal coherence {f_r:.12f} at r={r} after {it} iterations")
            return MinCoherenceResult(BlochVector.clipped(r), f_r, it, pg_norm, True)

        alpha = 1.0
        while True:
            candidate = project_to_ball(r - alpha * g)
            f_c = f(candidate)
            if f_c <= f_r + armijo_c * float(np.dot(g, candidate - r)):
                break
            alpha *= 0.5
            if alpha < 1e-14:
                break
        if alpha < 1e-14:
            message = f"line search stalled at iteration {it} (projected gradient {pg_norm:.3e})"
            break
        r, f_r = candidate, f_c
        if f_r < best_f:
            best_r, best_f = r, f_r
        Logger.debug(f"descent iteration {it}: C={f_r:.12f}, |pg|={pg_norm:.3e}, alpha={alpha:.3g}")
    else:
        message = f"no convergence after {max_iters} iterations (projected gradient {pg_norm:.3e})"

    Logger.warning(f"Minimal coherence search: {message}; returning best iterate")
    return MinCoherenceResult(BlochVector.clipped(best_r), best_f, it, pg_norm, False, message)


def fibonacci_sphere(n_points: int) -> np.ndarray:
    """(theta, phi) pairs of a Fibonacci lattice on the sphere."""
    k = np.arange(n_points) + 0.5
    theta = np.arccos(np.clip(1 - 2 * k / n_points, -1.0, 1.0))
    phi = np.mod(np.pi * (3 - np.sqrt(5)) * np.arange(n_points), 2 * np.pi)
    return np.column_stack([theta, phi])


def _pure_from_real(x: np.ndarray, d: int) -> np.ndarray:
    v = x[:d] + 1j * x[d:]
    return v / np.linalg.norm(v)


def max_coherence_pure(p: Povm,
                       grid_points: int = Constants.SPHERE_POINTS,
                       restarts: int = 20,
                       seed: int | np.random.Generator | None = 0) -> MaxCoherenceResult:
    """
    Maximal coherence over pure states.

    Qubits: best point of a Fibonacci sphere grid refined by Nelder-Mead on (theta, phi).
    Higher dimensions: Nelder-Mead on real amplitude coordinates from seeded random restarts.
    """
    ops = canonical_kraus(p)
    evaluations = 0

    def value_of(v: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        return coherence_of_operator(np.outer(v, np.conj(v)), ops)

    options = {"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000}
    if p.dim == 2:
        def angles_to_vec(a: np.ndarray) -> np.ndarray:
            return PureState.from_angles(a[0], a[1]).amplitudes

        grid = fibonacci_sphere(grid_points)
        values = np.array([value_of(angles_to_vec(a)) for a in grid])
        start = grid[int(np.argmax(values))]
        result = minimize(lambda a: -value_of(angles_to_vec(a)), start, method="Nelder-Mead", options=options)
        best_angles, best_value = (result.x, -result.fun) if -result.fun >= values.max() else (start, values.max())
        state = PureState(angles_to_vec(best_angles))
    else:
        rng = make_rng(seed)
        best_vec: Optional[np.ndarray] = None
        best_value = -np.inf
        for _ in range(max(restarts, 1)):
            x0 = rng.standard_normal(2 * p.dim)
            result = minimize(lambda x: -value_of(_pure_from_real(x, p.dim)), x0, method="Nelder-Mead",
                              options=options)
            if -result.fun > best_value:
                best_value, best_vec = -result.fun, _pure_from_real(result.x, p.dim)
        state = PureState(best_vec)

    Logger.info(f"Maximal pure-state coherence {best_value:.12f} after {evaluations} evaluations")
    return MaxCoherenceResult(state=state, value=float(best_value), evaluations=evaluations)

