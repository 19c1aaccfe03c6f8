# ipcondense/stats/empirical.py
# Weighted empirical distributions: CDF, tails, moments, standard errors and sup-norm distances.

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence

import numpy as np
from scipy import stats

from ..errors import DomainError


def summarize(values: Sequence[float]) -> Dict[str, float]:
    """mean, standard error and count, the record written to JSON summaries."""
    v = np.asarray(values, dtype=np.float64)
    n = int(v.size)
    if n == 0:
        return {"mean": None, "se": None, "count": 0}
    se = float(stats.sem(v)) if n > 1 else 0.0
    return {"mean": float(v.mean()), "se": se, "count": n}


@dataclass
class EmpiricalDistribution:
    samples: np.ndarray
    weights: Optional[np.ndarray] = None
    _order: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64).reshape(-1)
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
            if self.weights.shape != self.samples.shape:
                raise ValueError("weights and samples differ in length")
            if (self.weights < 0).any():
                raise ValueError("weights must be nonnegative")
        self._order = np.argsort(self.samples, kind="stable")

    def _require(self):
        if self.samples.size == 0:
            raise DomainError("empirical distribution is empty")

    @property
    def n(self) -> int:
        return int(self.samples.size)

    def _probabilities(self) -> np.ndarray:
        if self.weights is None:
            return np.full(self.n, 1.0 / self.n)
        return self.weights / self.weights.sum()

    def mean(self) -> float:
        self._require()
        return float(np.dot(self._probabilities(), self.samples))

    def se(self) -> float:
        """Standard error of the mean (Kish effective size when weighted)."""
        self._require()
        if self.n < 2:
            return 0.0
        if self.weights is None:
            return float(stats.sem(self.samples))
        p = self._probabilities()
        var = float(np.dot(p, (self.samples - self.mean()) ** 2))
        n_eff = 1.0 / float(np.dot(p, p))
        return math.sqrt(var / max(n_eff - 1.0, 1.0))

    def moment(self, a: float) -> float:
        self._require()
        return float(np.dot(self._probabilities(), np.abs(self.samples) ** a))

    def cdf(self, x) -> np.ndarray:
        """Right-continuous F(x) = P[X <= x]."""
        self._require()
        xs = self.samples[self._order]
        cum = np.cumsum(self._probabilities()[self._order])
        idx = np.searchsorted(xs, np.asarray(x, dtype=np.float64), side="right")
        return np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)

    def tail(self, x) -> np.ndarray:
        """P[X > x]."""
        return 1.0 - self.cdf(x)

    def ks_distance(self, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
        """sup_x |F_emp(x) - F(x)| against a continuous reference CDF."""
        self._require()
        if self.weights is None:
            return float(stats.kstest(self.samples, cdf).statistic)
        xs = self.samples[self._order]
        cum = np.cumsum(self._probabilities()[self._order])
        ref = np.asarray(cdf(xs), dtype=np.float64)
        before = np.concatenate([[0.0], cum[:-1]])
        return float(max(np.abs(cum - ref).max(), np.abs(before - ref).max()))

    def sup_distance(self, cdf: Callable[[np.ndarray], np.ndarray], grid: np.ndarray) -> float:
        """max over grid points of |F_emp - F|, for lattice (discrete) references."""
        self._require()
        grid = np.asarray(grid, dtype=np.float64)
        return float(np.abs(self.cdf(grid) - np.asarray(cdf(grid))).max())


def ks_distance(emp: EmpiricalDistribution, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    return emp.ks_distance(cdf)
