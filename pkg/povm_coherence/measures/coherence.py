from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from core.constants.constants import Constants
from core.logging.logging import Logger
from povm_coherence.errors import ValidationError
from povm_coherence.linalg.entropy import shannon_entropy, von_neumann_entropy
from povm_coherence.linalg.matrices import CMatrix
from povm_coherence.linalg.states import DensityMatrix
from povm_coherence.naimark.extension import NaimarkExtension, embed_state
from povm_coherence.povm.povm import MeasurementOperators, Povm, canonical_kraus, post_measurement_states


@dataclass(frozen=True)
class CoherenceReport:
    """C = H(probs) + sum_i probs_i * branch_entropies_i - state_entropy, in bits."""
    value: float
    probs: Tuple[float, ...]
    branch_entropies: Tuple[float, ...]
    state_entropy: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "probs": list(self.probs),
            "branch_entropies": list(self.branch_entropies),
            "state_entropy": self.state_entropy,
        }


@dataclass(frozen=True)
class IncoherenceResult:
    incoherent: bool
    max_residual: float

    def __bool__(self) -> bool:
        return self.incoherent


Projectors = Union[NaimarkExtension, Sequence[CMatrix]]


def _projectors(x: Projectors) -> Tuple[CMatrix, ...]:
    return x.projectors if isinstance(x, NaimarkExtension) else tuple(np.asarray(p, dtype=complex) for p in x)


def block_dephase(rho_prime: DensityMatrix, x: Projectors) -> DensityMatrix:
    """Delta[rho'] = sum_i P_i rho' P_i."""
    projs = _projectors(x)
    if projs[0].shape[0] != rho_prime.dim:
        raise ValidationError(f"State dimension {rho_prime.dim} does not match projector dimension {projs[0].shape[0]}")
    return DensityMatrix.from_normalized(sum(p @ rho_prime.matrix @ p for p in projs))


def c_rel_block(rho_prime: DensityMatrix, x: Projectors) -> float:
    """S(Delta[rho']) - S(rho')."""
    return von_neumann_entropy(block_dephase(rho_prime, x)) - von_neumann_entropy(rho_prime)


def c_rel_povm_from_extension(rho: DensityMatrix, x: NaimarkExtension) -> float:
    """Block coherence of rho (+) 0 on the extension space."""
    return c_rel_block(embed_state(rho, x), x)


def c_rel_povm(rho: DensityMatrix, p: Povm, ops: Optional[MeasurementOperators] = None) -> CoherenceReport:
    """
    POVM-based relative entropy of coherence from the outcome statistics and post-measurement states.

    Any measurement operators A_i = U_i sqrt(E_i) give the same value; sqrt(E_i) is used by default.
    """
    if rho.dim != p.dim:
        raise ValidationError(f"State dimension {rho.dim} does not match POVM dimension {p.dim}")
    ops = ops or canonical_kraus(p)
    branches = post_measurement_states(ops, rho)
    probs = np.array([b.probability for b in branches])
    probs = probs / probs.sum()
    branch_entropies = tuple(von_neumann_entropy(b.state) if b.defined else 0.0 for b in branches)

    outcome_entropy = shannon_entropy(probs)
    state_entropy = von_neumann_entropy(rho)
    value = outcome_entropy + float(np.dot(probs, branch_entropies)) - state_entropy
    if value < -Constants.PSD_TOL:
        Logger.warning(f"POVM coherence evaluated to {value:.3e} < 0")
    Logger.debug(f"C_rel = {value:.12f} (H = {outcome_entropy:.6f}, S = {state_entropy:.6f})")
    return CoherenceReport(value=value, probs=tuple(float(q) for q in probs),
                           branch_entropies=branch_entropies, state_entropy=state_entropy)


def coherence_value(rho: DensityMatrix, p: Povm, ops: Optional[MeasurementOperators] = None) -> float:
    return c_rel_povm(rho, p, ops).value


def is_povm_incoherent(rho: DensityMatrix, p: Povm, tol: float = Constants.INCOHERENCE_TOL) -> IncoherenceResult:
    """Incoherent iff E_i rho E_j = 0 for all i != j (Frobenius norm within ``tol``)."""
    if rho.dim != p.dim:
        raise ValidationError(f"State dimension {rho.dim} does not match POVM dimension {p.dim}")
    residual = 0.0
    for i, ei in enumerate(p.effects):
        left = ei @ rho.matrix
        for j, ej in enumerate(p.effects):
            if i != j:
                residual = max(residual, float(np.linalg.norm(left @ ej, "fro")))
    return IncoherenceResult(incoherent=residual <= tol, max_residual=residual)
