"""Named POVMs used throughout the tests, the CLI and the trine suite."""
from __future__ import annotations

from typing import List, Sequence

import numpy as np

from povm_coherence.errors import ValidationError
from povm_coherence.povm.povm import Povm

OMEGA = np.exp(2j * np.pi / 3)


def trine_vectors() -> List[np.ndarray]:
    """|phi_i> = (|0> + omega^{i-1}|1>) / sqrt(2)."""
    return [np.array([1.0, OMEGA ** k], dtype=complex) / np.sqrt(2) for k in range(3)]


def trine_directions() -> List[np.ndarray]:
    """Bloch directions m_i of the trine effects, 120 degrees apart on the equator."""
    return [np.array([np.cos(2 * np.pi * k / 3), np.sin(2 * np.pi * k / 3), 0.0]) for k in range(3)]


def trine_povm() -> Povm:
    """E_i = (2/3)|phi_i><phi_i|; E_1 = (1/3)[[1, 1], [1, 1]]."""
    effects = [(2 / 3) * np.outer(v, np.conj(v)) for v in trine_vectors()]
    return Povm.from_effects(effects)


def computational_povm(d: int) -> Povm:
    return Povm.from_effects([np.diag(row).astype(complex) for row in np.eye(d)])


def mixed_unitary_povm(probs: Sequence[float], d: int = 2) -> Povm:
    """{p_i 1}: every state has the same outcome statistics."""
    p = np.asarray(probs, dtype=float)
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValidationError(f"Weights {probs!r} are not a probability vector")
    return Povm.from_effects([pi * np.eye(d, dtype=complex) for pi in p])


def qutrit_split_povm() -> Povm:
    """|0><0|, |1><1|/2, |1><1|/2 + |2><2|: non-projective yet with incoherent states."""
    e1 = np.diag([1.0, 0.0, 0.0]).astype(complex)
    e2 = np.diag([0.0, 0.5, 0.0]).astype(complex)
    e3 = np.diag([0.0, 0.5, 1.0]).astype(complex)
    return Povm.from_effects([e1, e2, e3])


def perturbed(p: Povm, index: int = 0, scale: float = 1.01) -> Povm:
    """Scale one effect; the result generally fails completeness."""
    effects = list(p.effects)
    effects[index] = effects[index] * scale
    return Povm(tuple(effects))
