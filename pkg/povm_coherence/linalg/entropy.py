from __future__ import annotations

import numpy as np
import numpy.typing as npt

from core.constants.constants import Constants
from core.logging.logging import Logger
from povm_coherence.errors import ValidationError
from povm_coherence.linalg.matrices import eigvals_hermitian, hermitian_part, sqrtm_psd
from povm_coherence.linalg.states import DensityMatrix


def _xlog2x_sum(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def spectrum_entropy(eigenvalues: npt.ArrayLike, tol: float = Constants.PSD_TOL) -> float:
    """-sum(l log2 l) over a spectrum; values in [-tol, 0) count as zero."""
    vals = np.asarray(eigenvalues, dtype=float)
    if np.any(vals < -tol):
        raise ValidationError(f"Spectrum has negative eigenvalue {vals.min():.3e} beyond tolerance {tol:.1e}")
    # -0.0 from the sum of an all-zero spectrum
    return abs(_xlog2x_sum(np.clip(vals, 0.0, None)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """S(rho) in bits."""
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix.from_matrix(rho)
    value = spectrum_entropy(rho.eigenvalues)
    return float(min(value, np.log2(rho.dim)))


def shannon_entropy(p: npt.ArrayLike, tol: float = Constants.TRACE_TOL) -> float:
    """H(p) in bits; negative dust is clipped to 0."""
    probs = np.asarray(p, dtype=float).reshape(-1)
    if probs.size == 0:
        raise ValidationError("Probability vector is empty")
    if np.any(probs < -tol):
        raise ValidationError(f"Probability vector has negative entry {probs.min():.3e}")
    total = probs.sum()
    if abs(total - 1.0) > tol:
        raise ValidationError(f"Probabilities sum to {total!r}, not 1")
    return abs(_xlog2x_sum(np.clip(probs, 0.0, None)))


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Root fidelity tr sqrt(sqrt(rho) sigma sqrt(rho))."""
    if rho.dim != sigma.dim:
        raise ValidationError(f"Fidelity of states with dims {rho.dim} and {sigma.dim}")
    root = sqrtm_psd(rho.matrix)
    inner = hermitian_part(root @ sigma.matrix @ root)
    vals = np.clip(eigvals_hermitian(inner), 0.0, None)
    value = float(np.sum(np.sqrt(vals)))
    if value > 1 + 1e-9:
        Logger.warning(f"Fidelity {value!r} exceeds 1 beyond rounding")
    return float(np.clip(value, 0.0, 1.0))
