from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

import numpy as np
import numpy.typing as npt

from core.constants.constants import Constants
from core.utils.json_utils import decode_matrix, decode_vector, encode_matrix, encode_vector
from povm_coherence.errors import ValidationError
from povm_coherence.linalg.matrices import (
    CMatrix, as_square, dagger, eigvals_hermitian, frozen, hermitian_part, hermiticity_residual,
)

IDENTITY_2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, PSD, unit-trace matrix; validated on construction and read-only afterwards."""
    matrix: CMatrix
    eigenvalues: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        m = as_square(self.matrix, "density matrix")
        residual = hermiticity_residual(m)
        if residual > Constants.HERMITIAN_TOL:
            raise ValidationError(f"Density matrix is not Hermitian (residual {residual:.3e})")
        m = hermitian_part(m)
        trace = float(np.real(np.trace(m)))
        if abs(trace - 1.0) > Constants.TRACE_TOL:
            raise ValidationError(f"Density matrix has trace {trace!r}, expected 1")
        vals = eigvals_hermitian(m)
        if vals[-1] < -Constants.PSD_TOL:
            raise ValidationError(f"Density matrix has negative eigenvalue {vals[-1]:.3e}")
        object.__setattr__(self, "matrix", frozen(m))
        object.__setattr__(self, "eigenvalues", frozen(np.clip(vals, 0.0, None)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def purity(self) -> float:
        return float(np.sum(self.eigenvalues ** 2))

    def is_pure(self, tol: float = 1e-9) -> bool:
        return abs(self.purity - 1.0) <= tol

    # ================================
    #          FACTORIES
    # ================================

    @classmethod
    def from_matrix(cls, m: npt.ArrayLike) -> "DensityMatrix":
        return cls(np.asarray(m, dtype=complex))

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls(np.eye(d, dtype=complex) / d)

    @classmethod
    def basis(cls, d: int, k: int) -> "DensityMatrix":
        m = np.zeros((d, d), dtype=complex)
        m[k, k] = 1.0
        return cls(m)

    @classmethod
    def from_normalized(cls, m: np.ndarray) -> "DensityMatrix":
        """Hermitize, clip rounding noise and renormalize an operator known to be a state up to rounding."""
        m = hermitian_part(np.asarray(m, dtype=complex))
        vals, vecs = np.linalg.eigh(m)
        if vals[0] < 0:
            m = (vecs * np.clip(vals, 0.0, None)) @ dagger(vecs)
        return cls(m / np.real(np.trace(m)))

    def evolve(self, u: np.ndarray) -> "DensityMatrix":
        return DensityMatrix.from_normalized(u @ self.matrix @ dagger(u))

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "matrix": encode_matrix(self.matrix)}

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "DensityMatrix":
        """Accepts {"matrix"}, {"amplitudes"} or {"bloch"} encodings."""
        if "matrix" in d:
            state = DensityMatrix(decode_matrix(d["matrix"]))
        elif "amplitudes" in d:
            state = PureState(decode_vector(d["amplitudes"])).density()
        elif "bloch" in d:
            state = BlochVector(tuple(float(x) for x in d["bloch"])).density()
        else:
            raise ValidationError("State JSON needs one of 'matrix', 'amplitudes' or 'bloch'")
        if "dim" in d and int(d["dim"]) != state.dim:
            raise ValidationError(f"State JSON declares dim {d['dim']} but holds a {state.dim}-dimensional state")
        return state


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise ValidationError("Pure state needs finite amplitudes")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > Constants.TRACE_TOL:
            raise ValidationError(f"Pure state has norm {norm!r}, expected 1")
        object.__setattr__(self, "amplitudes", frozen(v / norm))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def normalized(cls, v: npt.ArrayLike) -> "PureState":
        v = np.asarray(v, dtype=complex).reshape(-1)
        return cls(v / np.linalg.norm(v))

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "PureState":
        """cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
        return cls(np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], dtype=complex))

    def density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amplitudes, np.conj(self.amplitudes)))

    def bloch(self) -> "BlochVector":
        return density_to_bloch(self.density())

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "amplitudes": encode_vector(self.amplitudes)}


@dataclass(frozen=True)
class BlochVector:
    r: Tuple[float, float, float]

    def __post_init__(self):
        r = tuple(float(x) for x in self.r)
        if len(r) != 3 or not all(np.isfinite(r)):
            raise ValidationError(f"Bloch vector needs three finite components, got {self.r!r}")
        norm = float(np.linalg.norm(r))
        if norm > 1.0 + Constants.TRACE_TOL:
            raise ValidationError(f"Bloch vector has length {norm!r} > 1")
        object.__setattr__(self, "r", r)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.r))

    def as_array(self) -> np.ndarray:
        return np.array(self.r, dtype=float)

    def density(self) -> DensityMatrix:
        return bloch_to_density(self)

    @classmethod
    def clipped(cls, r: npt.ArrayLike) -> "BlochVector":
        """Project onto the closed unit ball."""
        v = np.asarray(r, dtype=float)
        n = np.linalg.norm(v)
        return cls(tuple(v / n if n > 1.0 else v))


def bloch_to_density(r: BlochVector) -> DensityMatrix:
    """rho = (1 + r . sigma) / 2; +z is |0>."""
    x, y, z = r.r
    return DensityMatrix((IDENTITY_2 + x * PAULI_X + y * PAULI_Y + z * PAULI_Z) / 2)


def density_to_bloch(rho: DensityMatrix) -> BlochVector:
    if rho.dim != 2:
        raise ValidationError(f"Bloch vectors exist only for qubits, got dim {rho.dim}")
    r = [float(np.real(np.trace(rho.matrix @ p))) for p in PAULIS]
    return BlochVector.clipped(r)
