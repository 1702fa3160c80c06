"""
The six trine-incoherent qubit unitaries, derived from the minimal extension and listed explicitly.

Labels name the permutation of trine effects: ``(231)`` sends effect 1 to 2, 2 to 3 and 3 to 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg as sla

from core.logging.logging import Logger
from povm_coherence.errors import ExtensionError, ValidationError
from povm_coherence.linalg.matrices import CMatrix, dagger, eig_hermitian, equal_up_to_phase
from povm_coherence.linalg.random import make_rng, random_density, random_unitary
from povm_coherence.linalg.states import PAULIS, DensityMatrix
from povm_coherence.measures.coherence import coherence_value
from povm_coherence.naimark.extension import NaimarkExtension
from povm_coherence.povm.catalog import OMEGA, trine_directions, trine_povm
from povm_coherence.povm.povm import Povm

LabeledUnitary = Tuple[str, CMatrix]


def rotation(axis: np.ndarray, angle: float) -> CMatrix:
    """exp(-i angle n.sigma / 2) for a unit Bloch axis n."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    generator = sum(c * s for c, s in zip(n, PAULIS))
    return np.cos(angle / 2) * np.eye(2, dtype=complex) - 1j * np.sin(angle / 2) * generator


def rz(angle: float) -> CMatrix:
    return rotation(np.array([0.0, 0.0, 1.0]), angle)


def hadamard() -> CMatrix:
    return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def trine_incoherent_unitaries() -> List[LabeledUnitary]:
    """The six unit-determinant unitaries that permute the trine effects."""
    return [
        ("(123)", np.eye(2, dtype=complex)),
        ("(231)", np.diag([np.exp(-1j * np.pi / 3), np.exp(1j * np.pi / 3)])),
        ("(312)", np.diag([np.conj(OMEGA), OMEGA])),
        ("(132)", np.array([[0, -1j], [-1j, 0]], dtype=complex)),
        ("(321)", np.array([[0, np.exp(5j * np.pi / 6)], [np.exp(1j * np.pi / 6), 0]], dtype=complex)),
        ("(213)", np.array([[0, np.exp(1j * np.pi / 6)], [np.exp(5j * np.pi / 6), 0]], dtype=complex)),
    ]


def permutation_label(perm: Tuple[int, ...]) -> str:
    return "(" + "".join(str(k + 1) for k in perm) + ")"


def _range_vectors(x: NaimarkExtension) -> List[np.ndarray]:
    out = []
    for i, proj in enumerate(x.projectors):
        vals, vecs = eig_hermitian(proj)
        if np.sum(vals > 0.5) != 1:
            raise ExtensionError(f"Projector {i + 1} is not rank one; the trine derivation needs the minimal extension")
        out.append(vecs[:, 0])
    return out


def _unitary_for(perm: Tuple[int, ...], phi: List[np.ndarray], d: int) -> Optional[CMatrix]:
    """
    U' = sum_i z_i |phi_perm(i)><phi_i| with the embedded subspace kept invariant.

    Returns the unit-determinant system block, or None when the phases are not uniquely fixed.
    """
    n, d_prime = len(phi), phi[0].size
    # U'[a, c] = sum_i z_i phi_perm(i)[a] conj(phi_i[c]) = 0 for a >= d, c < d
    rows = [[phi[perm[i]][a] * np.conj(phi[i][c]) for i in range(n)]
            for a in range(d, d_prime) for c in range(d)]
    kernel = sla.null_space(np.array(rows, dtype=complex))
    if kernel.shape[1] != 1:
        Logger.warning(f"Permutation {permutation_label(perm)}: phase kernel has dimension {kernel.shape[1]}")
        return None
    z = kernel[:, 0]
    magnitudes = np.abs(z)
    if np.max(magnitudes) - np.min(magnitudes) > 1e-9 * np.max(magnitudes):
        Logger.warning(f"Permutation {permutation_label(perm)}: phases do not have equal magnitude")
        return None
    z = z / magnitudes[0]
    u_ext = sum(z[i] * np.outer(phi[perm[i]], np.conj(phi[i])) for i in range(n))
    block = u_ext[:d, :d]
    det = np.linalg.det(block)
    return block / np.sqrt(det)


def derive_incoherent_unitaries(x: NaimarkExtension) -> List[LabeledUnitary]:
    """Solve for the phases of every effect permutation and extract the system unitaries."""
    phi = _range_vectors(x)
    found = []
    for perm in permutations(range(len(phi))):
        u = _unitary_for(perm, phi, x.d)
        if u is None:
            raise ExtensionError(f"No incoherent unitary for permutation {permutation_label(perm)}")
        found.append((permutation_label(perm), u))
    Logger.info(f"Derived {len(found)} incoherent unitaries from the extension")
    return found


def same_unitary_set(a: List[LabeledUnitary], b: List[LabeledUnitary], tol: float = 1e-9) -> bool:
    """Equal as sets up to global phase."""
    if len(a) != len(b):
        return False
    return all(any(equal_up_to_phase(u, v, tol) for _, v in b) for _, u in a)


def maps_directions(u: CMatrix, directions: Optional[List[np.ndarray]] = None, tol: float = 1e-9) -> bool:
    """True when u permutes the Bloch directions (default: trine measurement directions)."""
    directions = directions or trine_directions()
    rotated = []
    for m in directions:
        rho = (np.eye(2) + sum(c * s for c, s in zip(m, PAULIS))) / 2
        out = u @ rho @ dagger(u)
        rotated.append(np.real([np.trace(out @ s) for s in PAULIS]))
    return all(any(np.linalg.norm(r - m) <= tol for m in directions) for r in rotated)


def closed_under_products(unitaries: List[LabeledUnitary], tol: float = 1e-9) -> bool:
    for _, u in unitaries:
        for _, v in unitaries:
            if not any(equal_up_to_phase(u @ v, w, tol) for _, w in unitaries):
                return False
    return True


@dataclass(frozen=True, eq=False)
class CoherenceIncrease:
    unitary: CMatrix
    state: DensityMatrix
    before: float
    after: float

    @property
    def gain(self) -> float:
        return self.after - self.before


def find_coherence_increasing_unitary(p: Optional[Povm] = None, seed: int = 0, attempts: int = 200,
                                      margin: float = 1e-3) -> CoherenceIncrease:
    """Random search for U and rho with C(U rho U^dagger) > C(rho) + margin."""
    p = p or trine_povm()
    if attempts < 1:
        raise ValidationError("attempts must be positive")
    rng = make_rng(seed)
    best: Optional[CoherenceIncrease] = None
    for _ in range(attempts):
        u = random_unitary(p.dim, rng)
        rho = random_density(p.dim, rng)
        candidate = CoherenceIncrease(u, rho, coherence_value(rho, p), coherence_value(rho.evolve(u), p))
        if best is None or candidate.gain > best.gain:
            best = candidate
        if best.gain > margin:
            break
    Logger.info(f"Best coherence gain {best.gain:.4f} bits")
    if best.gain <= margin:
        raise ValidationError(f"No unitary raised coherence by more than {margin} in {attempts} attempts")
    return best
