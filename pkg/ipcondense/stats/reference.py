# ipcondense/stats/reference.py
# Reference laws for the size-biased statistics: size-biased grand-canonical marginal and its exponential limit.

from __future__ import annotations

from typing import Callable

import numpy as np

from config import GC_TAIL_EPSILON
from ..errors import DomainError
from ..weights import GrandCanonical


def size_biased_gc_pmf(n, rho: float, d: float):
    """n w(n) φ^n / (ρ z(φ)) with φ = ρ/(d+ρ); zero at n = 0."""
    if not rho > 0:
        raise DomainError(f"density must be > 0, got {rho}")
    gc = GrandCanonical.at_density(rho, d)
    n_arr = np.asarray(n, dtype=np.float64)
    with np.errstate(divide="ignore"):
        out = np.exp(np.log(n_arr) + gc.log_pmf(n_arr) - np.log(rho))
    out = np.where(n_arr > 0, out, 0.0)
    return float(out) if out.ndim == 0 else out


def size_biased_gc_table(rho: float, d: float, eps: float = GC_TAIL_EPSILON) -> np.ndarray:
    """pmf over n = 0..n_cut where the neglected tail is below eps."""
    n_cut = GrandCanonical.at_density(rho, d).support_cutoff(eps)
    return size_biased_gc_pmf(np.arange(n_cut + 1), rho, d)


def scaled_lattice_cdf(pmf: np.ndarray, d: float) -> Callable[[np.ndarray], np.ndarray]:
    """CDF of d X for X with the given pmf on 0, 1, 2, ..."""
    cdf = np.minimum(np.cumsum(pmf), 1.0)

    def _cdf(u):
        idx = np.floor(np.asarray(u, dtype=np.float64) / d + 1e-9).astype(np.int64)
        idx = np.clip(idx, -1, cdf.size - 1)
        return np.where(idx < 0, 0.0, cdf[np.maximum(idx, 0)])

    return _cdf


def exponential_cdf(mean: float) -> Callable[[np.ndarray], np.ndarray]:
    """1 - exp(-u / mean) for u >= 0, the limit law of d η̃_i in the intermediate regime."""
    if not mean > 0:
        raise DomainError(f"mean must be > 0, got {mean}")

    def _cdf(u):
        u = np.asarray(u, dtype=np.float64)
        return np.where(u > 0, -np.expm1(-np.maximum(u, 0.0) / mean), 0.0)

    return _cdf
