"""
Process matrices, Choi matrices and row-reshuffling.

Conventions (row-major vec, lexicographic matrix units |i><j|):
    process:   P[(a, b), (k, l)] = Lambda(|k><l|)[a, b],   so  P = sum_K kron(K, conj(K))
    reshuffle: X^R[(p, q), (r, s)] = X[(p, r), (q, s)]
    Choi:      J = (1/d) sum_kl Lambda(|k><l|) (x) |k><l|   (output factor first)
               J = P^R / d,   P = d J^R,   tr_1 J = 1/d  for trace-preserving maps.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from core.constants.constants import Constants
from core.logging.logging import Logger
from core.utils.json_utils import decode_matrix, encode_matrix
from povm_coherence.errors import ValidationError
from povm_coherence.linalg.matrices import (
    CMatrix, as_square, dagger, frozen, hermitian_part, hermiticity_residual, min_eigenvalue, unvec, vec,
)
from povm_coherence.linalg.states import DensityMatrix


def _operator_dim(big: int) -> int:
    d = int(round(np.sqrt(big)))
    if d * d != big:
        raise ValidationError(f"Dimension {big} is not the square of an integer")
    return d


@dataclass(frozen=True, eq=False)
class ProcessMatrix:
    """Transfer matrix acting on row-major vectorized d x d operators."""
    matrix: CMatrix

    def __post_init__(self):
        m = as_square(self.matrix, "process matrix")
        _operator_dim(m.shape[0])
        object.__setattr__(self, "matrix", frozen(m))

    @property
    def dim(self) -> int:
        return _operator_dim(self.matrix.shape[0])

    def apply(self, x: np.ndarray) -> CMatrix:
        return unvec(self.matrix @ vec(x), self.dim)

    def apply_state(self, rho: DensityMatrix) -> DensityMatrix:
        return DensityMatrix.from_normalized(self.apply(rho.matrix))

    def compose(self, inner: "ProcessMatrix") -> "ProcessMatrix":
        """self after inner."""
        if inner.dim != self.dim:
            raise ValidationError(f"Cannot compose maps on dims {self.dim} and {inner.dim}")
        return ProcessMatrix(self.matrix @ inner.matrix)


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    matrix: CMatrix

    def __post_init__(self):
        m = as_square(self.matrix, "Choi matrix")
        _operator_dim(m.shape[0])
        object.__setattr__(self, "matrix", frozen(m))

    @property
    def dim(self) -> int:
        return _operator_dim(self.matrix.shape[0])

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "matrix": encode_matrix(self.matrix)}


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """rho -> sum_k K_k rho K_k^dagger on a d-dimensional system."""
    kraus: Tuple[CMatrix, ...]

    def __post_init__(self):
        ops = tuple(frozen(as_square(k, f"Kraus operator {i + 1}")) for i, k in enumerate(self.kraus))
        if not ops or len({k.shape[0] for k in ops}) != 1:
            raise ValidationError("Kraus operators must be a non-empty list of equal-size square matrices")
        object.__setattr__(self, "kraus", ops)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def trace_preservation_residual(self) -> float:
        return float(np.linalg.norm(sum(dagger(k) @ k for k in self.kraus) - np.eye(self.dim), "fro"))

    def require_cptp(self, tol: float = Constants.COMPLETENESS_TOL) -> "KrausChannel":
        residual = self.trace_preservation_residual()
        if residual > tol:
            raise ValidationError(f"Channel is not trace preserving (residual {residual:.3e})")
        return self

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        return DensityMatrix.from_normalized(sum(k @ rho.matrix @ dagger(k) for k in self.kraus))

    def process(self) -> ProcessMatrix:
        return process_from_kraus(self.kraus)

    @classmethod
    def unitary(cls, u: npt.ArrayLike) -> "KrausChannel":
        return cls((np.asarray(u, dtype=complex),))

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "kraus": [encode_matrix(k) for k in self.kraus]}

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "KrausChannel":
        if "kraus" not in d:
            raise ValidationError("Channel JSON needs a 'kraus' list")
        channel = KrausChannel(tuple(decode_matrix(k) for k in d["kraus"]))
        if "dim" in d and int(d["dim"]) != channel.dim:
            raise ValidationError(f"Channel JSON declares dim {d['dim']} "
                                  f"but Kraus operators are {channel.dim}-dimensional")
        return channel


def process_from_kraus(kraus: Sequence[npt.ArrayLike]) -> ProcessMatrix:
    ops = [as_square(k, "Kraus operator") for k in kraus]
    if not ops or len({k.shape for k in ops}) != 1:
        raise ValidationError("Kraus operators must share one square shape")
    return ProcessMatrix(sum(np.kron(k, np.conj(k)) for k in ops))


def reshuffle(x: npt.ArrayLike) -> CMatrix:
    """Row-reshuffle involution X[(p, r), (q, s)] -> X^R[(p, q), (r, s)]."""
    arr = as_square(x, "reshuffle input")
    d = _operator_dim(arr.shape[0])
    return arr.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)


def choi_from_process(p: ProcessMatrix) -> ChoiMatrix:
    return ChoiMatrix(reshuffle(p.matrix) / p.dim)


def process_from_choi(j: ChoiMatrix) -> ProcessMatrix:
    return ProcessMatrix(j.dim * reshuffle(j.matrix))


def partial_trace_first(x: npt.ArrayLike, d: int | None = None) -> CMatrix:
    """Trace over the first tensor factor of a (d*d) x (d*d) operator."""
    arr = np.asarray(x, dtype=complex)
    d = d or _operator_dim(arr.shape[0])
    return np.einsum("pqps->qs", arr.reshape(d, d, d, d))


@dataclass(frozen=True)
class ChoiDiagnostics:
    completely_positive: bool
    trace_preserving: bool
    hermitian: bool
    min_eigenvalue: float
    trace_residual: float
    hermiticity_residual: float

    @property
    def cptp(self) -> bool:
        return self.completely_positive and self.trace_preserving and self.hermitian


def choi_diagnostics(j: ChoiMatrix, tol: float = Constants.COMPLETENESS_TOL) -> ChoiDiagnostics:
    """CP iff J is PSD; TP iff tr_1 J = 1/d."""
    herm = hermiticity_residual(j.matrix)
    lam = min_eigenvalue(hermitian_part(j.matrix))
    tp = float(np.linalg.norm(partial_trace_first(j.matrix, j.dim) - np.eye(j.dim) / j.dim, "fro"))
    report = ChoiDiagnostics(completely_positive=lam >= -tol, trace_preserving=tp <= tol, hermitian=herm <= tol,
                             min_eigenvalue=lam, trace_residual=tp, hermiticity_residual=herm)
    Logger.debug(f"Choi diagnostics: min eig {lam:.3e}, tr_1 residual {tp:.3e}, hermiticity {herm:.3e}")
    return report
