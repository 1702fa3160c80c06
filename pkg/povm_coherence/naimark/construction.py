"""
Canonical (ancilla-coupling) and minimal (direct-sum) Naimark extensions.

Both constructions follow one recipe: an isometry W (d' x d) with W^dagger W = 1 whose
row blocks reproduce the measurement operators, a unitary M = [W | completion], and
P_i = M^dagger D_i M with D_i the coordinate projector onto block i. The upper-left
d x d block of P_i is then W^dagger D_i W = E_i.
"""
from __future__ import annotations

from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg as sla

from core.constants.constants import Constants
from core.logging.logging import Logger
from povm_coherence.enums.extension_kind import ExtensionKind, convert_to_extension_kind
from povm_coherence.errors import ExtensionError
from povm_coherence.linalg.matrices import CMatrix, dagger, eig_hermitian
from povm_coherence.naimark.extension import NaimarkExtension, validate_extension
from povm_coherence.povm.povm import MeasurementOperators, Povm, canonical_kraus


def _fix_phases(columns: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Make the first non-negligible entry of each column real and positive."""
    out = columns.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        idx = np.flatnonzero(np.abs(col) > tol)
        if idx.size:
            z = col[idx[0]]
            out[:, k] = col * (np.conj(z) / abs(z))
    return out


def complete_to_unitary(w: CMatrix) -> CMatrix:
    """[W | orthonormal basis of range(W)^perp]."""
    d_prime, d = w.shape
    gram_residual = float(np.linalg.norm(dagger(w) @ w - np.eye(d)))
    if gram_residual > 1e-8:
        raise ExtensionError(f"Stacked measurement operators are not an isometry (residual {gram_residual:.3e})")
    if d_prime == d:
        return w.copy()
    complement = sla.null_space(dagger(w))
    if complement.shape[1] != d_prime - d:
        raise ExtensionError(f"Isometry completion found {complement.shape[1]} vectors, expected {d_prime - d}")
    return np.hstack([w, _fix_phases(complement)])


def _projectors_from_blocks(m: CMatrix, blocks: Sequence[Sequence[int]]) -> List[CMatrix]:
    out = []
    for rows in blocks:
        sub = m[list(rows), :]
        p = dagger(sub) @ sub
        out.append((p + dagger(p)) / 2)
    return out


def _validated(x: NaimarkExtension, p: Povm) -> NaimarkExtension:
    report = validate_extension(x, p)
    if not report.ok:
        raise ExtensionError(f"{x.kind} extension failed validation: {'; '.join(report.messages)}")
    Logger.info(f"Built {x.kind} Naimark extension: d={x.d} -> d'={x.d_prime}, "
                f"max residual {report.max_residual:.2e}")
    return x


def canonical_extension(m: MeasurementOperators) -> NaimarkExtension:
    """
    Couple the system to an n-level ancilla prepared in its first basis state.

    V~ = sum_i A_i (x) |i><0| maps |psi>|0> to sum_i A_i|psi> (x) |i>; its columns on
    the ancilla's first basis state form the isometry, listed first so that the system
    subspace occupies the first d coordinates of H'. d' = n d and every P_i has rank d.
    """
    d, n = m.dim, m.n_outcomes
    # output coordinate t * n + i  <->  |t> (x) |i>
    w = np.zeros((d * n, d), dtype=complex)
    for i, a in enumerate(m.ops):
        w[i::n, :] = a
    u = complete_to_unitary(w)
    blocks = [range(i, d * n, n) for i in range(n)]
    x = NaimarkExtension(d=d, d_prime=d * n, projectors=tuple(_projectors_from_blocks(u, blocks)),
                         kind=ExtensionKind.CANONICAL)
    return _validated(x, m.povm())


def minimal_extension(p: Povm, rank_tol: float = Constants.RANK_TOL) -> NaimarkExtension:
    """
    Direct-sum extension of dimension d' = sum_i rank E_i.

    Each effect contributes rows sqrt(lambda) v^dagger over its nonzero eigenpairs; a
    projective POVM gives d' = d and P_i = E_i.
    """
    p.require_valid()
    rows: List[np.ndarray] = []
    blocks: List[range] = []
    for e in p.effects:
        vals, vecs = eig_hermitian(e)
        keep = vals > rank_tol
        b = np.sqrt(vals[keep])[:, None] * dagger(_fix_phases(vecs[:, keep]))
        blocks.append(range(len(rows), len(rows) + b.shape[0]))
        rows.extend(b)
    w = np.vstack(rows)
    u = complete_to_unitary(w)
    x = NaimarkExtension(d=p.dim, d_prime=w.shape[0], projectors=tuple(_projectors_from_blocks(u, blocks)),
                         kind=ExtensionKind.MINIMAL)
    return _validated(x, p)


def build_extension(p: Povm, kind: ExtensionKind | str = ExtensionKind.MINIMAL,
                    ops: Optional[MeasurementOperators] = None) -> NaimarkExtension:
    kind = convert_to_extension_kind(kind)
    if kind == ExtensionKind.MINIMAL:
        return minimal_extension(p)
    return canonical_extension(ops or canonical_kraus(p))
