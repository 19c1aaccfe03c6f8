# ipcondense/stats/sizebias.py
# Size-biased permutations of configurations, order statistics and the remaining-mass statistic R_k.

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from numba import njit

from ..dynamics.base_dynamics import Configuration
from ..dynamics.rate_tree import tree_build, tree_select, tree_update
from ..errors import DomainError

ConfigLike = Union[Configuration, np.ndarray, list, tuple]


def _occupations(config: ConfigLike) -> np.ndarray:
    if isinstance(config, Configuration):
        return config.occupations
    return np.asarray(config, dtype=np.int64)


@dataclass(frozen=True)
class UnitPartition:
    parts: np.ndarray
    residual: float = 0.0

    def __post_init__(self):
        parts = np.asarray(self.parts, dtype=np.float64)
        if parts.size and (parts.min() < 0.0 or parts.max() > 1.0):
            raise DomainError("unit-partition parts must lie in [0, 1]")
        if parts.sum() > 1.0 + 1e-12:
            raise DomainError(f"unit-partition parts sum to {parts.sum()} > 1")

    @property
    def k(self) -> int:
        return int(np.asarray(self.parts).size)

    def sorted(self) -> "UnitPartition":
        return UnitPartition(np.sort(np.asarray(self.parts))[::-1].copy(), self.residual)


@dataclass(frozen=True)
class SizeBiasedSample:
    values: np.ndarray       # η̃_1..η̃_L
    sourceN: int

    def fractions(self) -> UnitPartition:
        """η̃ / N as a partition of [0, 1]."""
        return UnitPartition(self.values / self.sourceN, 0.0)

    def scaled(self, d: float) -> np.ndarray:
        """d η̃_i, the scaling of the intermediate regime."""
        return d * self.values.astype(np.float64)


@njit(cache=True)
def _size_biased_order(masses, uniforms):
    """Sequential draws without replacement, each proportional to the remaining masses."""
    n = masses.size
    tree = tree_build(masses.astype(np.float64))
    order = np.empty(n, dtype=np.int64)
    for k in range(n):
        total = tree[1]
        x = tree_select(tree, uniforms[k] * total)
        order[k] = x
        tree_update(tree, x, 0.0)
    return order


def size_biased_permutation(config: ConfigLike, rng: np.random.Generator) -> SizeBiasedSample:
    """
    Occupied sites in size-biased order, then the empty sites in site order.
    """
    occ = _occupations(config)
    N = int(occ.sum())
    if N == 0:
        raise DomainError("size-biased permutation needs N >= 1")
    occupied = np.flatnonzero(occ)
    empty = np.flatnonzero(occ == 0)
    order = _size_biased_order(occ[occupied], rng.random(occupied.size))
    values = np.concatenate([occ[occupied][order], occ[empty]]).astype(np.int64)
    return SizeBiasedSample(values=values, sourceN=N)


def order_statistics(config: ConfigLike) -> np.ndarray:
    """Occupations sorted nonincreasing; entry 0 is the maximum η_(1)."""
    return np.sort(_occupations(config))[::-1].copy()


def r_k(sample: SizeBiasedSample, k: int) -> float:
    """Mass fraction left after the first k size-biased picks, 1 - (1/N) Σ_{i≤k} η̃_i."""
    if not 1 <= k <= sample.values.size:
        raise DomainError(f"k must lie in [1, {sample.values.size}], got {k}")
    return max(0.0, 1.0 - float(sample.values[:k].sum()) / sample.sourceN)


def r_k_profile(sample: SizeBiasedSample, k_max: int) -> np.ndarray:
    """R_1..R_{k_max}, padded with 0 beyond L."""
    csum = np.cumsum(sample.values[:k_max], dtype=np.float64)
    out = np.zeros(k_max)
    out[:csum.size] = np.clip(1.0 - csum / sample.sourceN, 0.0, 1.0)
    return out
