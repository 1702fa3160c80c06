"""
POVM-incoherent channel (PIC) characterization by SDP.

A system channel Lambda is POVM-incoherent iff some Choi matrix J on H' (x) H' satisfies
    (link)       E^dagger (d' J^R) E^ = Lambda^
    (trace)      tr_1 J = 1 / d'
    (block)      J^R Delta^ = Delta^ J^R Delta^
    (subspace)   J^R Omega^ = Omega^ J^R Omega^
    J >= 0.
Feasibility is decided by maximizing t subject to J - t 1 >= 0 and the equalities; the
channel is PIC iff t* >= -threshold.

The slack keeps that problem strictly feasible. Problems that need J >= 0 itself (fmax) are
posed on choi_face(x), the smallest face of the PSD cone that holds every solution of the
last four lines.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from core.constants.constants import Constants
from core.logging.logging import Logger
from core.utils.json_utils import encode_matrix
from povm_coherence.enums.sdp_status import SdpStatus, Sense
from povm_coherence.errors import SolverError, ValidationError
from povm_coherence.linalg.matrices import dagger, eig_hermitian, eigvals_hermitian
from povm_coherence.naimark.extension import NaimarkExtension
from povm_coherence.sdp.problem import (
    HermitianSdpProblem, LinearSystem, ReducedSystem, complex_to_real_embed, hermitian_from_embedding,
)
from povm_coherence.sdp.solver import SdpSolution, solve
from povm_coherence.superop.representations import (
    ChoiMatrix, KrausChannel, ProcessMatrix, choi_diagnostics, choi_from_process, reshuffle,
)
from povm_coherence.superop.transfer import dephasing_superop, embedding_superops, restrict_to_system


# ================================
#      CONSTRAINT FAMILIES
# ================================


def reshuffle_permutation(d_prime: int) -> np.ndarray:
    """perm with vec(J^R) = vec(J)[perm]."""
    return np.arange(d_prime ** 4).reshape(d_prime, d_prime, d_prime, d_prime).transpose(0, 2, 1, 3).reshape(-1)


def choi_support(x: NaimarkExtension) -> np.ndarray:
    """
    Indices (a, k) -> a * d' + k of J that can be nonzero.

    The subspace family forces J[(a, k), (a, k)] = 0 for outputs a >= d and inputs k < d, and
    J >= 0 then clears those rows and columns.
    """
    d, dp = x.d, x.d_prime
    return np.array([a * dp + k for a in range(dp) for k in range(dp) if not (a >= d and k < d)], dtype=int)


def _commutation_family(superop: np.ndarray, d_prime: int) -> np.ndarray:
    """Rows K with K . vec(J) = vec(J^R S - S J^R S)."""
    big = superop.shape[0]
    m = np.kron(np.eye(big), superop.T) - np.kron(superop, superop.T)
    m = m[np.max(np.abs(m), axis=1) > 1e-14]
    k = np.zeros_like(m)
    k[:, reshuffle_permutation(d_prime)] = m
    return k.reshape(-1, big, big)


def trace_family(d_prime: int) -> tuple[np.ndarray, np.ndarray]:
    """tr_1 J = 1/d'."""
    big = d_prime * d_prime
    k = np.zeros((big, big, big), dtype=complex)
    rhs = np.zeros(big, dtype=complex)
    for q in range(d_prime):
        for s in range(d_prime):
            row = q * d_prime + s
            for p in range(d_prime):
                k[row, p * d_prime + q, p * d_prime + s] = 1.0
            rhs[row] = 1.0 / d_prime if q == s else 0.0
    return k, rhs


def link_family(target: ProcessMatrix, x: NaimarkExtension) -> tuple[np.ndarray, np.ndarray]:
    """d' J[i d' + k, j d' + l] = Lambda^[i d + j, k d + l] for i, j, k, l < d."""
    d, dp = x.d, x.d_prime
    big = dp * dp
    rows = d ** 4
    k = np.zeros((rows, big, big), dtype=complex)
    rhs = np.zeros(rows, dtype=complex)
    row = 0
    for i in range(d):
        for j in range(d):
            for kk in range(d):
                for ll in range(d):
                    k[row, i * dp + kk, j * dp + ll] = dp
                    rhs[row] = target.matrix[i * d + j, kk * d + ll]
                    row += 1
    return k, rhs


def pic_families(x: NaimarkExtension, include_block: bool = True) -> List[tuple[str, np.ndarray, np.ndarray]]:
    """(label, K, rhs) for the trace, block and subspace families on the full Choi matrix."""
    k_trace, r_trace = trace_family(x.d_prime)
    families = [("trace", k_trace, r_trace)]
    if include_block:
        k_block = _commutation_family(dephasing_superop(x).matrix, x.d_prime)
        families.append(("block", k_block, np.zeros(k_block.shape[0], dtype=complex)))
    _, omega = embedding_superops(x)
    k_sub = _commutation_family(omega.matrix, x.d_prime)
    families.append(("subspace", k_sub, np.zeros(k_sub.shape[0], dtype=complex)))
    return families


def restrict(k: np.ndarray, support: np.ndarray) -> np.ndarray:
    return k[:, support][:, :, support]


def scatter(j_support: np.ndarray, support: np.ndarray, big: int) -> np.ndarray:
    j = np.zeros((big, big), dtype=complex)
    j[np.ix_(support, support)] = j_support
    return j


# ================================
#          MAX SLACK
# ================================


def _slack_problem(reduced: ReducedSystem, n: int, slack_floor: float) -> HermitianSdpProblem:
    """max s  s.t. the reduced equalities hold for J = X + (s - slack_floor) 1,  X >= 0, s >= 0."""
    a_x = reduced.blocks[0]
    traces = np.real(np.einsum("kii->k", a_x))
    return HermitianSdpProblem(
        block_dims=(n, 1),
        objective=(np.zeros((n, n), dtype=complex), np.ones((1, 1), dtype=complex)),
        constraint_blocks=(a_x, traces.reshape(-1, 1, 1).astype(complex)),
        rhs=reduced.rhs + slack_floor * traces,
        sense=Sense.MAXIMIZE,
    )


def _slack_point(solution: SdpSolution, n: int, slack_floor: float) -> Tuple[float, np.ndarray]:
    """(t, J) read back from a solved slack problem."""
    t = solution.objective_value - slack_floor
    return t, hermitian_from_embedding(solution.X[0]) + t * np.eye(n)


# ================================
#          MINIMAL FACE
# ================================


@dataclass(frozen=True, eq=False)
class ChoiFace:
    """
    Every feasible J equals scatter(B Y B^dagger) for some Y >= 0 of size ``rank``.

    ``support`` lists the coordinates of J that can be nonzero, ``basis`` (B) is an isometry on
    them, and some feasible Y is positive definite.
    """
    support: np.ndarray
    basis: np.ndarray
    big: int
    coordinate: bool

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def restrict(self, k: np.ndarray) -> np.ndarray:
        """Functionals H -> sum K_ab H_ab pulled back to Y: K -> B^T K conj(B)."""
        k = restrict(k, self.support)
        if self.coordinate:
            return k
        return np.einsum("ai,kab,bj->kij", self.basis, k, np.conj(self.basis))

    def lift(self, y: np.ndarray) -> np.ndarray:
        j = y if self.coordinate else self.basis @ y @ dagger(self.basis)
        return scatter(j, self.support, self.big)

    def reduction_tolerances(self) -> Dict[str, float]:
        """A rotated basis is only accurate to the face solve, so reduce() gets looser tolerances."""
        if self.coordinate:
            return {}
        return {"rank_tol": Constants.FACE_TOL, "consistency_tol": Constants.FACE_CONSISTENCY_TOL}


@lru_cache(maxsize=16)
def choi_face(x: NaimarkExtension, include_block: bool = True) -> ChoiFace:
    """
    Smallest face of the PSD cone holding every J that satisfies the trace, subspace and
    (optionally) block families.

    Maximizing the smallest eigenvalue without the link family ends in the relative interior of
    the feasible set, so its zero directions are exactly the directions every feasible J
    annihilates. Vanishing diagonal entries are dropped as coordinates; if the rest is still
    singular its range becomes the basis.
    """
    support = choi_support(x)
    n = support.size
    system = LinearSystem(block_dims=(n,))
    for label, k, rhs in pic_families(x, include_block):
        system.add(label, {0: restrict(k, support)}, rhs)
    reduced = system.reduce()
    if not reduced.consistent:
        raise SolverError(f"Incoherent-channel constraints are inconsistent (residual {reduced.residual:.3e})")

    solution = solve(complex_to_real_embed(_slack_problem(reduced, n, Constants.SLACK_FLOOR)))
    if not solution.near_optimal():
        raise SolverError(f"Face detection SDP did not converge (status {solution.status}, "
                          f"primal residual {solution.primal_residual:.2e}, gap {solution.gap:.2e})")
    t, j = _slack_point(solution, n, Constants.SLACK_FLOOR)
    big = x.d_prime ** 2
    if t > Constants.FACE_TOL:
        Logger.debug(f"Choi face on d'={x.d_prime}: full support {n}, slack {t:.3e}")
        return ChoiFace(support, np.eye(n, dtype=complex), big, coordinate=True)

    scale = float(eigvals_hermitian(j)[0])
    keep = np.real(np.diag(j)) > Constants.FACE_TOL * scale
    support, j = support[keep], j[np.ix_(keep, keep)]
    vals, vecs = eig_hermitian(j)
    rank = int(np.sum(vals > Constants.FACE_TOL * scale))
    coordinate = rank == support.size
    basis = np.eye(rank, dtype=complex) if coordinate else vecs[:, :rank]
    Logger.info(f"Choi face on d'={x.d_prime}: rank {rank} on {support.size} of {n} support coordinates"
                f"{'' if coordinate else ', rotated basis'}")
    return ChoiFace(support, basis, big, coordinate)


# ================================
#          VERDICT
# ================================


@dataclass(frozen=True, eq=False)
class PicVerdict:
    feasible: bool
    slack: float
    marginal: bool
    status: SdpStatus
    reason: str = ""
    choi: Optional[ChoiMatrix] = field(default=None)
    d: int = 0
    d_prime: int = 0

    def system_process(self) -> ProcessMatrix:
        """Lambda^ = E^dagger (d' J^R) E^ for the certified J."""
        if self.choi is None:
            raise ValidationError("No Choi matrix available for an infeasible verdict")
        extended = ProcessMatrix(self.d_prime * reshuffle(self.choi.matrix))
        e = np.zeros((self.d_prime ** 2, self.d ** 2), dtype=complex)
        for i in range(self.d):
            for j in range(self.d):
                e[i * self.d_prime + j, i * self.d + j] = 1.0
        return ProcessMatrix(e.conj().T @ extended.matrix @ e)

    def to_dict(self, include_choi: bool = False) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "feasible": self.feasible,
            "slack": self.slack if np.isfinite(self.slack) else None,
            "marginal": self.marginal,
            "status": str(self.status),
            "reason": self.reason,
        }
        if include_choi and self.choi is not None:
            out["choi"] = encode_matrix(self.choi.matrix)
        return out


def _target_process(target: Union[KrausChannel, ProcessMatrix]) -> ProcessMatrix:
    if isinstance(target, KrausChannel):
        target.require_cptp()
        return target.process()
    report = choi_diagnostics(choi_from_process(target), tol=1e-8)
    if not report.cptp:
        raise ValidationError(f"Target is not a channel (min Choi eigenvalue {report.min_eigenvalue:.3e}, "
                              f"trace residual {report.trace_residual:.3e})")
    return target


def pic_feasibility(target: Union[KrausChannel, ProcessMatrix], x: NaimarkExtension,
                    feas_threshold: float = Constants.FEAS_THRESHOLD,
                    tol: float = Constants.SOLVER_TOL,
                    max_iters: int = Constants.SOLVER_MAX_ITERS,
                    slack_floor: float = Constants.SLACK_FLOOR) -> PicVerdict:
    """Decide whether ``target`` is a POVM-incoherent operation for the POVM extended by ``x``."""
    process = _target_process(target)
    if process.dim != x.d:
        raise ValidationError(f"Channel acts on dim {process.dim}, extension system dim is {x.d}")

    big = x.d_prime ** 2
    support = choi_support(x)
    n = support.size
    system = LinearSystem(block_dims=(n,))
    k_link, r_link = link_family(process, x)
    system.add("link", {0: restrict(k_link, support)}, r_link)
    for label, k, rhs in pic_families(x):
        system.add(label, {0: restrict(k, support)}, rhs)
    reduced = system.reduce()

    verdict_args = dict(d=x.d, d_prime=x.d_prime)
    if not reduced.consistent:
        Logger.info(f"PIC check: equality constraints inconsistent (residual {reduced.residual:.3e})")
        return PicVerdict(False, float("-inf"), False, SdpStatus.INFEASIBLE,
                          reason="linear constraints are inconsistent", **verdict_args)

    problem = _slack_problem(reduced, n, slack_floor)
    Logger.info(f"PIC SDP on d'={x.d_prime}: {reduced.rank} independent constraints "
                f"({reduced.raw_rows} before reduction)")
    solution = solve(complex_to_real_embed(problem), tol=tol, max_iters=max_iters)

    if solution.status == SdpStatus.INFEASIBLE:
        return PicVerdict(False, -slack_floor, False, solution.status,
                          reason=f"no Choi matrix with minimum eigenvalue above {-slack_floor}", **verdict_args)
    if solution.status == SdpStatus.UNBOUNDED:
        raise SolverError("Slack maximization reported unbounded; the trace constraint should bound it")
    if not solution.near_optimal():
        raise SolverError(f"PIC SDP did not converge (status {solution.status}, "
                          f"primal residual {solution.primal_residual:.2e}, gap {solution.gap:.2e})")

    t, j_support = _slack_point(solution, n, slack_floor)
    feasible = t >= -feas_threshold
    marginal = (not feasible) and t >= -Constants.MARGINAL_FACTOR * feas_threshold
    reason = "" if solution.status == SdpStatus.OPTIMAL else "solver stopped early with small residuals"
    if marginal:
        Logger.warning(f"PIC verdict is marginal: slack {t:.3e} within {Constants.MARGINAL_FACTOR:g}x threshold")
        reason = reason or "slack within ten times the feasibility threshold"
    Logger.info(f"PIC verdict: feasible={feasible}, slack={t:.3e}")
    return PicVerdict(feasible=feasible, slack=float(t), marginal=marginal, status=solution.status, reason=reason,
                      choi=ChoiMatrix(scatter(j_support, support, big)) if feasible else None, **verdict_args)


def system_channel_of(verdict: PicVerdict, x: NaimarkExtension) -> ProcessMatrix:
    """Same as ``verdict.system_process`` but through the extension's embedding superoperator."""
    if verdict.choi is None:
        raise ValidationError("No Choi matrix available for an infeasible verdict")
    return restrict_to_system(ProcessMatrix(x.d_prime * reshuffle(verdict.choi.matrix)), x)
