from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from core.constants.constants import Constants
from core.logging.logging import Logger
from core.utils.json_utils import decode_matrix, encode_matrix
from povm_coherence.errors import ValidationError
from povm_coherence.linalg.matrices import (
    CMatrix, as_square, dagger, frozen, hermitian_part, hermiticity_residual, min_eigenvalue, numerical_rank,
    sqrtm_psd,
)
from povm_coherence.linalg.states import DensityMatrix


@dataclass(frozen=True)
class PovmDiagnostics:
    ok: bool
    dim: int
    n_outcomes: int
    min_eigenvalues: Tuple[float, ...]
    hermiticity_residuals: Tuple[float, ...]
    completeness_residual: float
    messages: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "dim": self.dim,
            "n_outcomes": self.n_outcomes,
            "min_eigenvalues": list(self.min_eigenvalues),
            "hermiticity_residuals": list(self.hermiticity_residuals),
            "completeness_residual": self.completeness_residual,
            "messages": list(self.messages),
        }


@dataclass(frozen=True, eq=False)
class Povm:
    """
    Ordered effects E_1..E_n on a d-dimensional space.

    Construction only checks shapes, so that an invalid candidate can still be inspected with
    :func:`validate`. Operations that need a genuine POVM call :meth:`require_valid`.
    """
    effects: Tuple[CMatrix, ...]

    def __post_init__(self):
        effects = tuple(as_square(e, f"effect {i + 1}") for i, e in enumerate(self.effects))
        if not effects:
            raise ValidationError("A POVM needs at least one effect")
        dims = {e.shape[0] for e in effects}
        if len(dims) != 1:
            raise ValidationError(f"Effects have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "effects", tuple(frozen(e) for e in effects))

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.effects)

    def ranks(self, tol: float = Constants.RANK_TOL) -> List[int]:
        return [numerical_rank(e, tol) for e in self.effects]

    def is_projective(self, tol: float = 1e-9) -> bool:
        return all(np.max(np.abs(e @ e - e)) <= tol for e in self.effects)

    def require_valid(self) -> "Povm":
        report = validate(self)
        if not report.ok:
            raise ValidationError("Invalid POVM: " + "; ".join(report.messages))
        return self

    @classmethod
    def from_effects(cls, effects: Sequence[npt.ArrayLike]) -> "Povm":
        """Build and validate."""
        return cls(tuple(np.asarray(e, dtype=complex) for e in effects)).require_valid()

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "effects": [encode_matrix(e) for e in self.effects]}

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "Povm":
        if "effects" not in d:
            raise ValidationError("POVM JSON needs an 'effects' list")
        povm = Povm(tuple(decode_matrix(e) for e in d["effects"]))
        if "dim" in d and int(d["dim"]) != povm.dim:
            raise ValidationError(f"POVM JSON declares dim {d['dim']} but effects are {povm.dim}x{povm.dim}")
        return povm


def validate(p: Povm, tol: float = Constants.COMPLETENESS_TOL) -> PovmDiagnostics:
    """Per-effect Hermiticity and minimum eigenvalue, plus the completeness residual ||sum E_i - 1||_F."""
    messages: List[str] = []
    herm = tuple(hermiticity_residual(e) for e in p.effects)
    mins = tuple(min_eigenvalue(e) for e in p.effects)

    for i, (h, m) in enumerate(zip(herm, mins), start=1):
        if h > Constants.HERMITIAN_TOL:
            messages.append(f"effect {i} is not Hermitian (residual {h:.3e})")
        if m < -Constants.PSD_TOL:
            messages.append(f"effect {i} is not positive semidefinite (min eigenvalue {m:.3e})")

    completeness = float(np.linalg.norm(sum(p.effects) - np.eye(p.dim), "fro"))
    if completeness > tol:
        messages.append(f"effects do not sum to the identity (residual {completeness:.3e})")

    report = PovmDiagnostics(ok=not messages, dim=p.dim, n_outcomes=p.n_outcomes, min_eigenvalues=mins,
                             hermiticity_residuals=herm, completeness_residual=completeness,
                             messages=tuple(messages))
    if report.ok:
        Logger.debug(f"POVM with {p.n_outcomes} outcomes on dim {p.dim} validated")
    else:
        Logger.warning(f"POVM validation failed: {'; '.join(messages)}")
    return report


@dataclass(frozen=True, eq=False)
class MeasurementOperators:
    """Operators A_i with sum A_i^dagger A_i = 1."""
    ops: Tuple[CMatrix, ...]

    def __post_init__(self):
        ops = tuple(frozen(as_square(a, f"measurement operator {i + 1}")) for i, a in enumerate(self.ops))
        if not ops or len({a.shape[0] for a in ops}) != 1:
            raise ValidationError("Measurement operators must be a non-empty list of equal-size square matrices")
        residual = float(np.linalg.norm(sum(dagger(a) @ a for a in ops) - np.eye(ops[0].shape[0]), "fro"))
        if residual > Constants.COMPLETENESS_TOL:
            raise ValidationError(f"Measurement operators are not complete (residual {residual:.3e})")
        object.__setattr__(self, "ops", ops)

    @property
    def dim(self) -> int:
        return self.ops[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.ops)

    def povm(self) -> Povm:
        return Povm(tuple(hermitian_part(dagger(a) @ a) for a in self.ops))

    def with_unitaries(self, unitaries: Sequence[np.ndarray]) -> "MeasurementOperators":
        """A_i -> U_i A_i; describes the same POVM."""
        if len(unitaries) != self.n_outcomes:
            raise ValidationError(f"Need {self.n_outcomes} unitaries, got {len(unitaries)}")
        return MeasurementOperators(tuple(u @ a for u, a in zip(unitaries, self.ops)))


@dataclass(frozen=True, eq=False)
class Branch:
    """One measurement outcome: its probability and, when defined, the post-measurement state."""
    probability: float
    state: Optional[DensityMatrix] = field(default=None)

    @property
    def defined(self) -> bool:
        return self.state is not None


def canonical_kraus(p: Povm) -> MeasurementOperators:
    """A_i = sqrt(E_i)."""
    p.require_valid()
    return MeasurementOperators(tuple(sqrtm_psd(e) for e in p.effects))


def _check_dims(dim: int, rho: DensityMatrix):
    if rho.dim != dim:
        raise ValidationError(f"State dimension {rho.dim} does not match measurement dimension {dim}")


def outcome_probs(p: Povm, rho: DensityMatrix) -> np.ndarray:
    """p_i = tr[E_i rho], dust below zero clipped."""
    _check_dims(p.dim, rho)
    probs = np.array([np.real(np.trace(e @ rho.matrix)) for e in p.effects], dtype=float)
    if np.any(probs < -Constants.PROB_DUST):
        raise ValidationError(f"Negative outcome probability {probs.min():.3e}; is the POVM valid?")
    return np.clip(probs, 0.0, None)


def post_measurement_states(m: MeasurementOperators, rho: DensityMatrix) -> List[Branch]:
    """(p_i, A_i rho A_i^dagger / p_i); outcomes with p_i <= 1e-12 carry no state."""
    _check_dims(m.dim, rho)
    branches: List[Branch] = []
    for a in m.ops:
        unnormalized = hermitian_part(a @ rho.matrix @ dagger(a))
        prob = max(float(np.real(np.trace(unnormalized))), 0.0)
        if prob > Constants.ZERO_PROB:
            branches.append(Branch(prob, DensityMatrix.from_normalized(unnormalized)))
        else:
            branches.append(Branch(prob, None))
    return branches


def measurement_channel(m: MeasurementOperators, rho: DensityMatrix) -> DensityMatrix:
    """sum_i A_i rho A_i^dagger."""
    _check_dims(m.dim, rho)
    return DensityMatrix.from_normalized(sum(a @ rho.matrix @ dagger(a) for a in m.ops))
