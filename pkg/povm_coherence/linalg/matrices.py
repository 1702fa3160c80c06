"""Dense complex matrix helpers shared by every other module.

Vectorization is row-major throughout: ``vec(X)[i*d + j] == X[i, j]`` so that
``vec(A @ X @ B) == kron(A, B.T) @ vec(X)``.
"""
from __future__ import annotations

from typing import Tuple

import numpy as np
import numpy.typing as npt
import scipy.linalg as sla

from core.constants.constants import Constants
from povm_coherence.errors import ValidationError

CMatrix = npt.NDArray[np.complex128]


def as_matrix(x: npt.ArrayLike, name: str = "matrix") -> CMatrix:
    """Coerce to a finite 2-D complex array."""
    arr = np.asarray(x, dtype=complex)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    return arr


def as_square(x: npt.ArrayLike, name: str = "matrix") -> CMatrix:
    arr = as_matrix(x, name)
    if arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {arr.shape}")
    return arr


def frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, copy=True)
    out.flags.writeable = False
    return out


def dagger(x: np.ndarray) -> np.ndarray:
    return np.conj(x).T


def hermiticity_residual(h: np.ndarray) -> float:
    return float(np.max(np.abs(h - dagger(h)))) if h.size else 0.0


def is_hermitian(h: np.ndarray, tol: float = Constants.HERMITIAN_TOL) -> bool:
    return h.ndim == 2 and h.shape[0] == h.shape[1] and hermiticity_residual(h) <= tol


def hermitian_part(h: np.ndarray) -> np.ndarray:
    return (h + dagger(h)) / 2


def eig_hermitian(h: npt.ArrayLike, tol: float = Constants.HERMITIAN_TOL) -> Tuple[np.ndarray, CMatrix]:
    """
    Eigen-decomposition of a Hermitian matrix.

    :return: (eigenvalues sorted descending, unitary whose columns are the matching eigenvectors)
    :raises ValidationError: if ``h`` is not Hermitian within ``tol``
    """
    arr = as_square(h, "Hermitian input")
    residual = hermiticity_residual(arr)
    if residual > tol:
        raise ValidationError(f"Matrix is not Hermitian (max |H - H^dagger| = {residual:.3e} > {tol:.1e})")
    vals, vecs = sla.eigh(hermitian_part(arr))
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def eigvals_hermitian(h: np.ndarray) -> np.ndarray:
    """Descending spectrum of the Hermitian part, no validation."""
    return sla.eigvalsh(hermitian_part(h))[::-1]


def min_eigenvalue(h: np.ndarray) -> float:
    return float(sla.eigvalsh(hermitian_part(h))[0]) if h.size else 0.0


def sqrtm_psd(h: np.ndarray) -> CMatrix:
    """Principal square root of a PSD matrix; negative dust is clipped."""
    vals, vecs = sla.eigh(hermitian_part(h))
    vals = np.sqrt(np.clip(vals, 0.0, None))
    return (vecs * vals) @ dagger(vecs)


def range_basis(h: npt.ArrayLike, rel_tol: float = Constants.STATE_RANGE_TOL) -> CMatrix:
    """Orthonormal columns spanning the eigenvectors of a PSD matrix above rel_tol * lambda_max."""
    vals, vecs = eig_hermitian(h)
    return vecs[:, vals > rel_tol * max(float(vals[0]), 0.0)]


def numerical_rank(h: np.ndarray, tol: float = Constants.RANK_TOL) -> int:
    return int(np.sum(eigvals_hermitian(h) > tol))


def direct_sum_embed(x: npt.ArrayLike, d_prime: int) -> CMatrix:
    """X (d x d) -> X (+) 0 on the first d coordinates of a d'-dimensional space."""
    arr = as_square(x)
    d = arr.shape[0]
    if d_prime < d:
        raise ValidationError(f"Target dimension {d_prime} is smaller than the matrix dimension {d}")
    out = np.zeros((d_prime, d_prime), dtype=complex)
    out[:d, :d] = arr
    return out


def vec(x: np.ndarray) -> np.ndarray:
    return np.asarray(x, dtype=complex).reshape(-1)


def unvec(v: np.ndarray, d: int | None = None) -> CMatrix:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if d is None:
        d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise ValidationError(f"Vector of length {v.size} is not a vectorized square matrix")
    return v.reshape(d, d)


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    """True when a = e^{i alpha} b for some real alpha."""
    if a.shape != b.shape:
        return False
    overlap = np.vdot(b, a)
    if abs(overlap) < tol:
        return bool(np.allclose(a, 0, atol=tol) and np.allclose(b, 0, atol=tol))
    phase = overlap / abs(overlap)
    return bool(np.max(np.abs(a - phase * b)) <= tol)
