from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import numpy as np

from core.constants.constants import Constants
from core.logging.logging import Logger
from core.utils.json_utils import decode_matrix, encode_matrix
from povm_coherence.enums.extension_kind import ExtensionKind, convert_to_extension_kind
from povm_coherence.errors import ValidationError
from povm_coherence.linalg.matrices import CMatrix, as_square, dagger, direct_sum_embed, frozen
from povm_coherence.linalg.states import DensityMatrix
from povm_coherence.povm.povm import Povm


@dataclass(frozen=True, eq=False)
class NaimarkExtension:
    """
    Orthogonal projectors P_i on a d'-dimensional space H'.

    The system embeds as X -> X (+) 0 on the first d coordinates of H', for every kind.
    """
    d: int
    d_prime: int
    projectors: Tuple[CMatrix, ...]
    kind: ExtensionKind

    def __post_init__(self):
        projectors = tuple(frozen(as_square(p, f"projector {i + 1}")) for i, p in enumerate(self.projectors))
        if not projectors:
            raise ValidationError("Extension needs at least one projector")
        if any(p.shape[0] != self.d_prime for p in projectors):
            raise ValidationError(f"Projectors must be {self.d_prime}x{self.d_prime}")
        if self.d > self.d_prime:
            raise ValidationError(f"Extension dimension {self.d_prime} is below system dimension {self.d}")
        object.__setattr__(self, "projectors", projectors)
        object.__setattr__(self, "kind", convert_to_extension_kind(self.kind))

    @property
    def n_outcomes(self) -> int:
        return len(self.projectors)

    @property
    def subspace_projector(self) -> CMatrix:
        """Pi_E = 1_d (+) 0."""
        return direct_sum_embed(np.eye(self.d), self.d_prime)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "d_prime": self.d_prime,
            "kind": str(self.kind),
            "projectors": [encode_matrix(p) for p in self.projectors],
        }

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "NaimarkExtension":
        return NaimarkExtension(
            d=int(data["d"]),
            d_prime=int(data["d_prime"]),
            projectors=tuple(decode_matrix(p) for p in data["projectors"]),
            kind=data.get("kind", ExtensionKind.MINIMAL),
        )


@dataclass(frozen=True)
class ExtensionDiagnostics:
    ok: bool
    idempotency_residual: float
    hermiticity_residual: float
    orthogonality_residual: float
    completeness_residual: float
    block_residual: float
    messages: Tuple[str, ...] = ()

    @property
    def max_residual(self) -> float:
        return max(self.idempotency_residual, self.hermiticity_residual, self.orthogonality_residual,
                   self.completeness_residual, self.block_residual)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "max_residual": self.max_residual,
            "idempotency_residual": self.idempotency_residual,
            "hermiticity_residual": self.hermiticity_residual,
            "orthogonality_residual": self.orthogonality_residual,
            "completeness_residual": self.completeness_residual,
            "block_residual": self.block_residual,
            "messages": list(self.messages),
        }


def _fro(x: np.ndarray) -> float:
    return float(np.linalg.norm(x, "fro"))


def validate_extension(x: NaimarkExtension, p: Povm, tol: float = Constants.COMPLETENESS_TOL) -> ExtensionDiagnostics:
    """Projector algebra on H' plus E_i (+) 0 = Pi_E P_i Pi_E, in POVM order."""
    messages: List[str] = []
    if x.n_outcomes != p.n_outcomes or x.d != p.dim:
        messages.append(f"extension has {x.n_outcomes} projectors on d={x.d}, "
                        f"POVM has {p.n_outcomes} effects on d={p.dim}")
        Logger.warning(f"Extension validation failed: {messages[-1]}")
        inf = float("inf")
        return ExtensionDiagnostics(False, inf, inf, inf, inf, inf, tuple(messages))

    projs = x.projectors
    idem = max(_fro(q @ q - q) for q in projs)
    herm = max(_fro(q - dagger(q)) for q in projs)
    orth = max((_fro(projs[i] @ projs[j]) for i in range(len(projs)) for j in range(len(projs)) if i != j),
               default=0.0)
    comp = _fro(sum(projs) - np.eye(x.d_prime))
    block = max(_fro(q[:x.d, :x.d] - e) for q, e in zip(projs, p.effects))

    for name, value in (("idempotency", idem), ("hermiticity", herm), ("orthogonality", orth),
                        ("completeness", comp), ("block match", block)):
        if value > tol:
            messages.append(f"{name} residual {value:.3e} exceeds {tol:.1e}")

    report = ExtensionDiagnostics(not messages, idem, herm, orth, comp, block, tuple(messages))
    if not report.ok:
        Logger.warning(f"Extension validation failed: {'; '.join(messages)}")
    return report


def embed_state(rho: DensityMatrix, x: NaimarkExtension) -> DensityMatrix:
    """rho (+) 0 on H'."""
    if rho.dim != x.d:
        raise ValidationError(f"State dimension {rho.dim} does not match extension system dimension {x.d}")
    return DensityMatrix(direct_sum_embed(rho.matrix, x.d_prime))
