"""
Dense SDP solves through cvxopt's primal-dual interior-point method (Nesterov-Todd scaling).

The standard form  max <C, X>  s.t.  <A_k, X> = b_k,  X >= 0  is exactly the dual of cvxopt's
``solvers.sdp`` problem  min b'y  s.t.  sum_k y_k (-A_k) + S = -C,  S >= 0,  so X is read from
the dual variable ``zs`` and y from ``x``. Residuals are recomputed here, independent of the
solver's own bookkeeping.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np
from cvxopt import matrix, solvers

from core.constants.constants import Constants
from core.logging.logging import Logger
from povm_coherence.enums.sdp_status import SdpStatus, Sense
from povm_coherence.errors import SolverError
from povm_coherence.linalg.matrices import min_eigenvalue
from povm_coherence.sdp.problem import SdpProblem

_STATUS = {
    "optimal": SdpStatus.OPTIMAL,
    # cvxopt's dual is our primal
    "dual infeasible": SdpStatus.INFEASIBLE,
    "primal infeasible": SdpStatus.UNBOUNDED,
    "unknown": SdpStatus.MAX_ITERATIONS,
}


@dataclass(frozen=True, eq=False)
class SdpSolution:
    status: SdpStatus
    X: Tuple[np.ndarray, ...]
    y: np.ndarray
    objective_value: float
    primal_residual: float
    dual_residual: float
    gap: float
    iterations: int

    @property
    def has_point(self) -> bool:
        return self.status in (SdpStatus.OPTIMAL, SdpStatus.MAX_ITERATIONS) and bool(self.X)

    def near_optimal(self, residual_tol: float = 1e-6, gap_tol: float = 1e-5) -> bool:
        """Usable point: optimal, or stopped early with small residuals."""
        if self.status == SdpStatus.OPTIMAL:
            return True
        return (self.has_point and self.primal_residual <= residual_tol
                and self.dual_residual <= residual_tol and self.gap <= gap_tol)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": str(self.status),
            "objective_value": self.objective_value,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "gap": self.gap,
            "iterations": self.iterations,
            "y": self.y.tolist(),
        }


def _symmetrize(x: np.ndarray) -> np.ndarray:
    return (x + x.T) / 2


def solve(problem: SdpProblem, tol: float = Constants.SOLVER_TOL,
          max_iters: int = Constants.SOLVER_MAX_ITERS) -> SdpSolution:
    """Solve a real standard-form SDP; statuses: optimal | infeasible | unbounded | max_iterations."""
    m = problem.n_constraints
    if m == 0:
        raise SolverError("Problem has no equality constraints")
    sign = 1.0 if problem.sense == Sense.MAXIMIZE else -1.0
    objective = tuple(sign * c for c in problem.objective)

    c = matrix(np.ascontiguousarray(problem.rhs, dtype=float).reshape(m, 1))
    gs = [matrix(np.ascontiguousarray(-a.reshape(m, n * n).T, dtype=float))
          for a, n in zip(problem.constraint_blocks, problem.block_dims)]
    hs = [matrix(np.ascontiguousarray(-cb, dtype=float)) for cb in objective]
    options = {"abstol": tol, "reltol": tol, "feastol": tol, "maxiters": int(max_iters), "show_progress": False}

    Logger.debug(f"SDP: blocks {list(problem.block_dims)}, {m} constraints, sense {problem.sense}")
    try:
        sol = solvers.sdp(c, Gs=gs, hs=hs, options=options)
    except (ValueError, ArithmeticError) as e:
        raise SolverError(f"SDP backend failed: {e}") from e

    status = _STATUS.get(sol["status"], SdpStatus.MAX_ITERATIONS)
    iterations = int(sol.get("iterations", 0) or 0)
    if sol.get("zs") is None or sol.get("x") is None:
        Logger.warning(f"SDP returned status '{sol['status']}' without iterates")
        return SdpSolution(status, (), np.zeros(0), float("nan"), float("inf"), float("inf"), float("inf"),
                           iterations)

    x_blocks = tuple(_symmetrize(np.array(z)) for z in sol["zs"])
    y = np.array(sol["x"]).reshape(-1)

    if status in (SdpStatus.INFEASIBLE, SdpStatus.UNBOUNDED):
        Logger.info(f"SDP status {status} after {iterations} iterations")
        return SdpSolution(status, x_blocks, y, float("nan"), float("nan"), float("nan"), float("nan"), iterations)

    primal_value = float(sum(np.sum(cb * xb) for cb, xb in zip(objective, x_blocks)))
    dual_value = float(problem.rhs @ y)
    primal_residual = float(np.linalg.norm(problem.constraint_values(x_blocks) - problem.rhs))
    dual_residual = 0.0
    for a, cb in zip(problem.constraint_blocks, objective):
        slack = np.einsum("k,kij->ij", y, a) - cb
        dual_residual = max(dual_residual, max(0.0, -min_eigenvalue(_symmetrize(slack))))
    gap = abs(primal_value - dual_value)

    if status == SdpStatus.MAX_ITERATIONS:
        Logger.warning(f"SDP stopped without certified optimum after {iterations} iterations "
                       f"(primal residual {primal_residual:.2e}, gap {gap:.2e})")
    else:
        Logger.info(f"SDP optimal after {iterations} iterations: objective {sign * primal_value:.10f}, "
                    f"gap {gap:.2e}")
    return SdpSolution(status=status, X=x_blocks, y=y, objective_value=sign * primal_value,
                       primal_residual=primal_residual, dual_residual=dual_residual, gap=gap,
                       iterations=iterations)
