"""Transfer matrices tied to a Naimark extension: block dephasing, embedding and subspace projection."""
from __future__ import annotations

from typing import Tuple

import numpy as np

from core.constants.constants import Constants
from core.logging.logging import Logger
from povm_coherence.errors import ValidationError
from povm_coherence.linalg.matrices import CMatrix
from povm_coherence.naimark.extension import NaimarkExtension
from povm_coherence.povm.povm import Povm
from povm_coherence.superop.representations import ProcessMatrix, process_from_kraus


def dephasing_superop(x: NaimarkExtension) -> ProcessMatrix:
    """Delta^ = sum_i P_i (x) conj(P_i)."""
    return process_from_kraus(x.projectors)


def embedding_matrix(d: int, d_prime: int) -> CMatrix:
    """0/1 matrix E^ of shape (d'^2, d^2) with E^ vec(X) = vec(X (+) 0)."""
    if d_prime < d:
        raise ValidationError(f"Cannot embed dimension {d} into {d_prime}")
    e = np.zeros((d_prime * d_prime, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            e[i * d_prime + j, i * d + j] = 1.0
    return e


def embedding_superops(x: NaimarkExtension) -> Tuple[CMatrix, ProcessMatrix]:
    """(E^, Omega^) with Omega[rho'] = Pi_E rho' Pi_E and Omega^ = E^ E^dagger."""
    e = embedding_matrix(x.d, x.d_prime)
    return e, ProcessMatrix(e @ e.conj().T)


def restrict_to_system(extended: ProcessMatrix, x: NaimarkExtension) -> ProcessMatrix:
    """Lambda^ = E^dagger Lambda'^ E^, the system channel E^dagger o Lambda' o E."""
    if extended.dim != x.d_prime:
        raise ValidationError(f"Extended process acts on dim {extended.dim}, extension has d'={x.d_prime}")
    e = embedding_matrix(x.d, x.d_prime)
    return ProcessMatrix(e.conj().T @ extended.matrix @ e)


def block_incoherence_residual(process: ProcessMatrix, dephasing: ProcessMatrix) -> float:
    """||Lambda^ Delta^ - Delta^ Lambda^ Delta^||_F."""
    lam, delta = process.matrix, dephasing.matrix
    return float(np.linalg.norm(lam @ delta - delta @ lam @ delta, "fro"))


def is_block_incoherent_process(process: ProcessMatrix, dephasing: ProcessMatrix,
                                tol: float = Constants.FEAS_THRESHOLD) -> bool:
    """Lambda o Delta = Delta o Lambda o Delta: free states map to free states."""
    residual = block_incoherence_residual(process, dephasing)
    Logger.debug(f"Block-incoherence residual {residual:.3e}")
    return residual <= tol


def is_mio_process(process: ProcessMatrix, p: Povm, tol: float = Constants.FEAS_THRESHOLD) -> bool:
    """Maximally-incoherent check against a projective POVM on the system itself."""
    if not p.is_projective():
        raise ValidationError("The direct incoherence check needs a projective POVM")
    return is_block_incoherent_process(process, process_from_kraus(p.effects), tol)
