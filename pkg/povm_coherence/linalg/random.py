"""Seeded random generators for states, unitaries, POVM effects and channels."""
from __future__ import annotations

from typing import List

import numpy as np
from scipy.stats import unitary_group

from povm_coherence.linalg.matrices import CMatrix, dagger, sqrtm_psd
from povm_coherence.linalg.states import BlochVector, DensityMatrix, PureState


def make_rng(seed: int | np.random.Generator | None = 0) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_unitary(d: int, rng: np.random.Generator) -> CMatrix:
    """Haar-random unitary."""
    return np.asarray(unitary_group.rvs(d, random_state=rng), dtype=complex).reshape(d, d)


def random_ginibre(d: int, k: int, rng: np.random.Generator) -> CMatrix:
    return rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))


def random_pure_state(d: int, rng: np.random.Generator) -> PureState:
    return PureState.normalized(random_ginibre(d, 1, rng)[:, 0])


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Induced-measure mixed state; full rank unless ``rank`` is given."""
    g = random_ginibre(d, rank or d, rng)
    return DensityMatrix.from_normalized(g @ dagger(g))


def random_bloch_vector(rng: np.random.Generator) -> BlochVector:
    """Uniform in the unit ball."""
    direction = rng.standard_normal(3)
    direction /= np.linalg.norm(direction)
    return BlochVector.clipped(direction * rng.uniform() ** (1 / 3))


def random_effects(d: int, n: int, rng: np.random.Generator) -> List[CMatrix]:
    """n full-rank PSD effects summing to the identity: E_i = S^{-1/2} G_i S^{-1/2}."""
    raw = [g @ dagger(g) for g in (random_ginibre(d, d, rng) for _ in range(n))]
    total = sum(raw)
    inv_root = np.linalg.inv(sqrtm_psd(total))
    effects = [inv_root @ g @ inv_root for g in raw]
    return [(e + dagger(e)) / 2 for e in effects]


def random_kraus(d: int, n_kraus: int, rng: np.random.Generator) -> List[CMatrix]:
    """Kraus set of a random CPTP map from an isometry slice of a Haar unitary."""
    u = random_unitary(d * n_kraus, rng)
    isometry = u[:, :d]
    return [isometry[k * d:(k + 1) * d, :] for k in range(n_kraus)]
