"""
SDP data in standard form and the Hermitian-to-real reduction.

Standard form:  maximize (or minimize) <C, X>  s.t.  <A_k, X> = b_k,  X = diag(X_1, ..., X_B) >= 0,
with <A, X> = tr(A X) blockwise. Complex problems are written over Hermitian blocks and
embedded into real symmetric ones by H -> [[Re H, -Im H], [Im H, Re H]]; coefficients are
scaled by 1/2 so that every objective and constraint value is preserved exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Mapping, Sequence, Tuple

import numpy as np
import scipy.linalg as sla

from core.constants.constants import Constants
from core.logging.logging import Logger
from core.utils.json_utils import encode_matrix
from povm_coherence.enums.sdp_status import Sense
from povm_coherence.errors import SolverError, ValidationError

_SYMMETRY_TOL = 1e-10


def _check_blocks(blocks: Sequence[np.ndarray], dims: Sequence[int], what: str, m: int | None = None):
    if len(blocks) != len(dims):
        raise ValidationError(f"{what}: expected {len(dims)} blocks, got {len(blocks)}")
    for b, n in zip(blocks, dims):
        shape = (n, n) if m is None else (m, n, n)
        if b.shape != shape:
            raise ValidationError(f"{what}: block of shape {b.shape}, expected {shape}")
        if b.size and np.max(np.abs(b - np.conj(np.swapaxes(b, -1, -2)))) > _SYMMETRY_TOL * max(1.0, np.max(np.abs(b))):
            raise ValidationError(f"{what}: coefficient block is not symmetric/Hermitian")


@dataclass(frozen=True, eq=False)
class SdpProblem:
    """Real symmetric blocks; ``constraint_blocks[b]`` has shape (m, n_b, n_b)."""
    block_dims: Tuple[int, ...]
    objective: Tuple[np.ndarray, ...]
    constraint_blocks: Tuple[np.ndarray, ...]
    rhs: np.ndarray
    sense: Sense = Sense.MAXIMIZE

    def __post_init__(self):
        rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        objective = tuple(np.asarray(c, dtype=float) for c in self.objective)
        blocks = tuple(np.asarray(a, dtype=float) for a in self.constraint_blocks)
        _check_blocks(objective, self.block_dims, "objective")
        _check_blocks(blocks, self.block_dims, "constraints", rhs.size)
        total = sum(n * n for n in self.block_dims)
        if rhs.size > total:
            raise ValidationError(f"{rhs.size} constraints exceed the {total} variable entries")
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "constraint_blocks", blocks)
        object.__setattr__(self, "sense", Sense(self.sense))

    @property
    def n_constraints(self) -> int:
        return self.rhs.size

    @property
    def constraints(self) -> Iterator[Tuple[Tuple[np.ndarray, ...], float]]:
        for k in range(self.n_constraints):
            yield tuple(a[k] for a in self.constraint_blocks), float(self.rhs[k])

    def constraint_values(self, x: Sequence[np.ndarray]) -> np.ndarray:
        return sum(np.einsum("kij,ij->k", a, xb) for a, xb in zip(self.constraint_blocks, x))

    def objective_value(self, x: Sequence[np.ndarray]) -> float:
        return float(sum(np.sum(c * xb) for c, xb in zip(self.objective, x)))

    def to_dict(self) -> Dict[str, Any]:
        """Debug dump."""
        return {
            "sense": str(self.sense),
            "block_dims": list(self.block_dims),
            "objective": [c.tolist() for c in self.objective],
            "rhs": self.rhs.tolist(),
            "constraints": [[a[k].tolist() for a in self.constraint_blocks] for k in range(self.n_constraints)],
        }


@dataclass(frozen=True, eq=False)
class HermitianSdpProblem:
    """Same standard form over complex Hermitian blocks."""
    block_dims: Tuple[int, ...]
    objective: Tuple[np.ndarray, ...]
    constraint_blocks: Tuple[np.ndarray, ...]
    rhs: np.ndarray
    sense: Sense = Sense.MAXIMIZE

    def __post_init__(self):
        rhs = np.asarray(self.rhs)
        if np.iscomplexobj(rhs) and np.max(np.abs(rhs.imag), initial=0.0) > _SYMMETRY_TOL:
            raise ValidationError("Right-hand sides of Hermitian constraints must be real")
        rhs = np.real(rhs).astype(float).reshape(-1)
        objective = tuple(np.asarray(c, dtype=complex) for c in self.objective)
        blocks = tuple(np.asarray(a, dtype=complex) for a in self.constraint_blocks)
        _check_blocks(objective, self.block_dims, "objective")
        _check_blocks(blocks, self.block_dims, "constraints", rhs.size)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "constraint_blocks", blocks)
        object.__setattr__(self, "sense", Sense(self.sense))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sense": str(self.sense),
            "block_dims": list(self.block_dims),
            "objective": [encode_matrix(c) for c in self.objective],
            "rhs": self.rhs.tolist(),
            "constraints": [[encode_matrix(a[k]) for a in self.constraint_blocks] for k in range(self.rhs.size)],
        }


# ================================
#          REAL EMBEDDING
# ================================


def real_embedding(h: np.ndarray) -> np.ndarray:
    """[[Re H, -Im H], [Im H, Re H]] (acts on stacked leading axes too)."""
    h = np.asarray(h, dtype=complex)
    top = np.concatenate([h.real, -h.imag], axis=-1)
    bottom = np.concatenate([h.imag, h.real], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def hermitian_from_embedding(x: np.ndarray) -> np.ndarray:
    """Inverse read-back: (X11 + X22)/2 + i (X21 - X12)/2."""
    n = x.shape[0] // 2
    x11, x12, x21, x22 = x[:n, :n], x[:n, n:], x[n:, :n], x[n:, n:]
    return (x11 + x22) / 2 + 1j * (x21 - x12) / 2


def complex_to_real_embed(problem: HermitianSdpProblem) -> SdpProblem:
    """Each Hermitian block H of size n becomes a real symmetric block of size 2n; values preserved."""
    for c in problem.objective:
        if np.max(np.abs(c - c.conj().T), initial=0.0) > _SYMMETRY_TOL:
            raise ValidationError("Objective block is not Hermitian")
    return SdpProblem(
        block_dims=tuple(2 * n for n in problem.block_dims),
        objective=tuple(real_embedding(c) / 2 for c in problem.objective),
        constraint_blocks=tuple(real_embedding(a) / 2 for a in problem.constraint_blocks),
        rhs=problem.rhs,
        sense=problem.sense,
    )


# ================================
#      HERMITIAN COORDINATES
# ================================
# theta(H) = [diag(H), sqrt(2) Re H_upper, sqrt(2) Im H_upper]: an orthonormal real chart,
# so that tr(A H) = theta(A) . theta(H) for Hermitian A.


def _upper(n: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, 1)


def functional_to_theta(k: np.ndarray) -> np.ndarray:
    """
    Coefficients of H -> sum_ab K_ab H_ab in theta coordinates (complex, one row per functional).

    Works on a stack of shape (r, n, n).
    """
    n = k.shape[-1]
    iu, ju = _upper(n)
    diag = k[:, np.arange(n), np.arange(n)]
    upper, lower = k[:, iu, ju], k[:, ju, iu]
    re = (upper + lower) / np.sqrt(2)
    im = 1j * (upper - lower) / np.sqrt(2)
    return np.concatenate([diag, re, im], axis=1)


def theta_to_hermitian(rows: np.ndarray, n: int) -> np.ndarray:
    """Hermitian A (stacked) with tr(A H) = row . theta(H)."""
    iu, ju = _upper(n)
    u = iu.size
    out = np.zeros((rows.shape[0], n, n), dtype=complex)
    out[:, np.arange(n), np.arange(n)] = rows[:, :n]
    off = (rows[:, n:n + u] + 1j * rows[:, n + u:]) / np.sqrt(2)
    out[:, iu, ju] = off
    out[:, ju, iu] = np.conj(off)
    return out


@dataclass(frozen=True, eq=False)
class ReducedSystem:
    """Linearly independent real equality rows, split per block as Hermitian coefficient matrices."""
    blocks: Tuple[np.ndarray, ...]
    rhs: np.ndarray
    raw_rows: int
    rank: int
    consistent: bool
    residual: float


@dataclass
class LinearSystem:
    """
    Complex linear equalities on Hermitian block variables, collected family by family.

    Each family is a stack of functionals H -> sum_ab K_ab H_ab with complex right-hand sides;
    real and imaginary parts become separate real rows in theta coordinates.
    """
    block_dims: Tuple[int, ...]
    _rows: List[np.ndarray] = field(default_factory=list, repr=False)
    _rhs: List[np.ndarray] = field(default_factory=list, repr=False)

    @property
    def offsets(self) -> List[int]:
        return list(np.cumsum([0] + [n * n for n in self.block_dims]))

    def add(self, label: str, coeffs: Mapping[int, np.ndarray], rhs: np.ndarray) -> None:
        rhs = np.asarray(rhs, dtype=complex).reshape(-1)
        r = rhs.size
        offsets = self.offsets
        theta = np.zeros((r, offsets[-1]), dtype=complex)
        for b, k in coeffs.items():
            k = np.asarray(k, dtype=complex)
            n = self.block_dims[b]
            if k.shape != (r, n, n):
                raise ValidationError(f"{label}: coefficients of shape {k.shape}, expected {(r, n, n)}")
            theta[:, offsets[b]:offsets[b + 1]] = functional_to_theta(k)
        rows = np.vstack([theta.real, theta.imag])
        values = np.concatenate([rhs.real, rhs.imag])
        scale = max(1.0, float(np.max(np.abs(rows), initial=0.0)))
        # zero rows with a nonzero right-hand side stay, so that reduce() reports the inconsistency
        keep = (np.max(np.abs(rows), axis=1) > 1e-14 * scale) | (np.abs(values) > Constants.CONSISTENCY_TOL)
        dropped = rows.shape[0] - int(keep.sum())
        self._rows.append(rows[keep])
        self._rhs.append(values[keep])
        Logger.debug(f"constraint family '{label}': {r} complex rows -> {int(keep.sum())} real rows "
                     f"({dropped} trivial dropped)")

    def reduce(self, rank_tol: float = Constants.RANK_REDUCTION_TOL,
               consistency_tol: float = Constants.CONSISTENCY_TOL) -> ReducedSystem:
        """Drop dependent rows by pivoted QR; report whether the full system is consistent."""
        if not self._rows:
            raise SolverError("No constraints were added")
        g = np.vstack(self._rows)
        h = np.concatenate(self._rhs)
        r, piv = sla.qr(g.T, mode="r", pivoting=True)
        diag = np.abs(np.diag(r))
        rank = int(np.sum(diag > rank_tol * diag[0])) if diag.size and diag[0] > 0 else 0
        keep = np.sort(piv[:rank])
        g_red, h_red = g[keep], h[keep]

        theta, *_ = sla.lstsq(g_red, h_red) if rank else (np.zeros(g.shape[1]),)
        residual = float(np.linalg.norm(g @ theta - h))
        consistent = residual <= consistency_tol * max(1.0, float(np.linalg.norm(h)))
        Logger.debug(f"Equality system: {g.shape[0]} rows, rank {rank}, consistency residual {residual:.3e}")

        offsets = self.offsets
        blocks = tuple(theta_to_hermitian(g_red[:, offsets[b]:offsets[b + 1]].astype(complex), n)
                       for b, n in enumerate(self.block_dims))
        return ReducedSystem(blocks=blocks, rhs=h_red, raw_rows=g.shape[0], rank=rank,
                             consistent=consistent, residual=residual)


def entry_functionals(n: int, entries: Sequence[Tuple[int, int]], weight: complex = 1.0) -> np.ndarray:
    """Stack of functionals H -> weight * H[a, b]."""
    k = np.zeros((len(entries), n, n), dtype=complex)
    for row, (a, b) in enumerate(entries):
        k[row, a, b] = weight
    return k
