"""Conversion-fidelity SDPs and small closed-form oracles for the solver."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np
import numpy.typing as npt

from core.constants.constants import Constants
from core.logging.logging import Logger
from core.utils.json_utils import encode_matrix
from povm_coherence.enums.sdp_status import ChannelClass, SdpStatus, Sense
from povm_coherence.errors import SolverError, ValidationError
from povm_coherence.linalg.matrices import as_square, dagger, hermitian_part, hermiticity_residual, range_basis
from povm_coherence.linalg.states import DensityMatrix
from povm_coherence.naimark.extension import NaimarkExtension
from povm_coherence.sdp.pic import choi_face, pic_families
from povm_coherence.sdp.problem import (
    HermitianSdpProblem, LinearSystem, SdpProblem, complex_to_real_embed, entry_functionals,
    hermitian_from_embedding,
)
from povm_coherence.sdp.solver import SdpSolution, solve
from povm_coherence.superop.representations import ProcessMatrix, reshuffle
from povm_coherence.superop.transfer import restrict_to_system


@dataclass(frozen=True, eq=False)
class FmaxResult:
    value: float
    raw_value: float
    process: ProcessMatrix
    status: SdpStatus

    def to_dict(self, include_process: bool = False) -> Dict[str, Any]:
        out: Dict[str, Any] = {"fmax": self.value, "raw_value": self.raw_value, "status": str(self.status)}
        if include_process:
            out["process"] = encode_matrix(self.process.matrix)
        return out


def _fidelity_objective(top: np.ndarray, bottom: np.ndarray) -> np.ndarray:
    """
    C with <C, Z> = Re tr(top Z_12 bottom^dagger).

    Z is the fidelity block compressed to the ranges ``top`` and ``bottom``; identities give
    1/2 [[0, 1], [1, 0]] and <C, Z> = Re tr Z_12.
    """
    s, r = top.shape[1], bottom.shape[1]
    c = np.zeros((s + r, s + r), dtype=complex)
    c[:s, s:] = dagger(top) @ bottom / 2
    c[s:, :s] = dagger(bottom) @ top / 2
    return c


def _pin_block(n: int, offset: int, target: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Functionals Z[offset + a, offset + b] = target[a, b] for a <= b."""
    d = target.shape[0]
    pairs = [(a, b) for a in range(d) for b in range(a, d)]
    k = entry_functionals(n, [(offset + a, offset + b) for a, b in pairs])
    return k, np.array([target[a, b] for a, b in pairs], dtype=complex)


def _require_usable(solution: SdpSolution, what: str) -> None:
    if solution.status in (SdpStatus.INFEASIBLE, SdpStatus.UNBOUNDED):
        raise SolverError(f"{what}: solver reported {solution.status}")
    if not solution.near_optimal():
        raise SolverError(f"{what}: no converged point (status {solution.status}, "
                          f"primal residual {solution.primal_residual:.2e}, gap {solution.gap:.2e})")


def _clip_unit(value: float, what: str) -> float:
    if value > 1 + 1e-6 or value < -1e-6:
        Logger.warning(f"{what} {value!r} lies outside [0, 1] beyond solver accuracy")
    return float(np.clip(value, 0.0, 1.0))


def _compress(state: DensityMatrix) -> Tuple[np.ndarray, np.ndarray]:
    """(B, B^dagger rho B) with B an orthonormal basis of the range of rho."""
    basis = range_basis(state.matrix)
    return basis, hermitian_part(dagger(basis) @ state.matrix @ basis)


def fmax(rho: DensityMatrix, sigma: DensityMatrix, x: NaimarkExtension,
         mode: ChannelClass = ChannelClass.PIC,
         tol: float = Constants.SOLVER_TOL,
         max_iters: int = Constants.SOLVER_MAX_ITERS) -> FmaxResult:
    """
    Largest fidelity F(Lambda[rho], sigma) over POVM-incoherent channels Lambda.

    Variables are the extended Choi matrix J = B Y B^dagger on the face from ``choi_face`` and the
    fidelity block Z = [[B_s^dagger sigma B_s, X], [X^dagger, Lambda[rho]]] with B_s spanning the range
    of sigma; the value is max Re tr(B_s X).
    ``ChannelClass.CPTP`` drops the block-incoherence family and so optimizes over every channel
    that keeps the embedded subspace.
    """
    if rho.dim != x.d or sigma.dim != x.d:
        raise ValidationError(f"States of dims {rho.dim}, {sigma.dim} do not match system dim {x.d}")
    mode = ChannelClass(mode)
    d, dp = x.d, x.d_prime
    big = dp * dp
    include_block = mode == ChannelClass.PIC
    face = choi_face(x, include_block)
    sigma_basis, sigma_block = _compress(sigma)
    s = sigma_basis.shape[1]
    zdim = s + d

    system = LinearSystem(block_dims=(face.rank, zdim))
    for label, k, rhs in pic_families(x, include_block):
        system.add(label, {0: face.restrict(k)}, rhs)

    k_sigma, r_sigma = _pin_block(zdim, 0, sigma_block)
    system.add("target", {1: k_sigma}, r_sigma)

    # Z[s + i, s + j] = Lambda[rho][i, j] = d' sum_kl rho[k, l] J[i d' + k, j d' + l]
    pairs = [(i, j) for i in range(d) for j in range(i, d)]
    k_j = np.zeros((len(pairs), big, big), dtype=complex)
    for row, (i, j) in enumerate(pairs):
        for kk in range(d):
            for ll in range(d):
                k_j[row, i * dp + kk, j * dp + ll] = -dp * rho.matrix[kk, ll]
    k_z = entry_functionals(zdim, [(s + i, s + j) for i, j in pairs])
    system.add("output", {0: face.restrict(k_j), 1: k_z}, np.zeros(len(pairs)))

    reduced = system.reduce(**face.reduction_tolerances())
    if not reduced.consistent:
        raise SolverError(f"fmax equality system is inconsistent (residual {reduced.residual:.3e})")

    problem = HermitianSdpProblem(
        block_dims=(face.rank, zdim),
        objective=(np.zeros((face.rank, face.rank), dtype=complex),
                   _fidelity_objective(sigma_basis, np.eye(d, dtype=complex))),
        constraint_blocks=reduced.blocks,
        rhs=reduced.rhs,
        sense=Sense.MAXIMIZE,
    )
    Logger.debug(f"fmax SDP ({mode}): Choi face {face.rank}, fidelity block {zdim}, {reduced.rank} constraints")
    solution = solve(complex_to_real_embed(problem), tol=tol, max_iters=max_iters)
    _require_usable(solution, "fmax")

    raw = float(solution.objective_value)
    j = face.lift(hermitian_from_embedding(solution.X[0]))
    process = restrict_to_system(ProcessMatrix(dp * reshuffle(j)), x)
    value = _clip_unit(raw, "fmax")
    Logger.info(f"fmax ({mode}) = {value:.8f}")
    return FmaxResult(value=value, raw_value=raw, process=process, status=solution.status)


# ================================
#            ORACLES
# ================================


def fidelity_sdp(rho: DensityMatrix, sigma: DensityMatrix, tol: float = Constants.SOLVER_TOL) -> float:
    """max Re tr X  s.t.  [[sigma, X], [X^dagger, rho]] >= 0, which equals the root fidelity."""
    if rho.dim != sigma.dim:
        raise ValidationError(f"Fidelity of states with dims {rho.dim} and {sigma.dim}")
    (sigma_basis, sigma_block), (rho_basis, rho_block) = _compress(sigma), _compress(rho)
    s = sigma_basis.shape[1]
    n = s + rho_basis.shape[1]
    system = LinearSystem(block_dims=(n,))
    for label, offset, target in (("sigma", 0, sigma_block), ("rho", s, rho_block)):
        k, rhs = _pin_block(n, offset, target)
        system.add(label, {0: k}, rhs)
    reduced = system.reduce()
    problem = HermitianSdpProblem(block_dims=(n,), objective=(_fidelity_objective(sigma_basis, rho_basis),),
                                  constraint_blocks=reduced.blocks, rhs=reduced.rhs, sense=Sense.MAXIMIZE)
    solution = solve(complex_to_real_embed(problem), tol=tol)
    _require_usable(solution, "fidelity SDP")
    return _clip_unit(solution.objective_value, "Fidelity SDP value")


def lambda_max_sdp(a: npt.ArrayLike, tol: float = Constants.SOLVER_TOL) -> float:
    """Largest eigenvalue of a real symmetric matrix as  max <A, X>  s.t.  tr X = 1, X >= 0."""
    arr = as_square(a, "lambda_max input")
    if np.max(np.abs(arr.imag), initial=0.0) > 0 or hermiticity_residual(arr) > Constants.HERMITIAN_TOL:
        raise ValidationError("lambda_max_sdp needs a real symmetric matrix")
    n = arr.shape[0]
    problem = SdpProblem(block_dims=(n,), objective=(arr.real,), constraint_blocks=(np.eye(n)[None],),
                         rhs=np.ones(1), sense=Sense.MAXIMIZE)
    solution = solve(problem, tol=tol)
    _require_usable(solution, "lambda_max SDP")
    return float(solution.objective_value)


def _unit_symmetric(n: int, a: int, b: int) -> np.ndarray:
    e = np.zeros((n, n))
    e[a, b] = e[b, a] = 1.0 if a == b else 0.5
    return e


def max_trace_below_identity(d: int, tol: float = Constants.SOLVER_TOL) -> float:
    """max tr X  s.t.  X + S = 1, X, S >= 0; the optimum is d."""
    if d < 1:
        raise ValidationError(f"Dimension must be positive, got {d}")
    pairs = [(a, b) for a in range(d) for b in range(a, d)]
    units = np.array([_unit_symmetric(d, a, b) for a, b in pairs])
    rhs = np.array([1.0 if a == b else 0.0 for a, b in pairs])
    problem = SdpProblem(block_dims=(d, d), objective=(np.eye(d), np.zeros((d, d))),
                         constraint_blocks=(units, units), rhs=rhs, sense=Sense.MAXIMIZE)
    solution = solve(problem, tol=tol)
    _require_usable(solution, "max-trace SDP")
    return float(solution.objective_value)

