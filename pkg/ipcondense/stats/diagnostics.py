# ipcondense/stats/diagnostics.py
# Condensation diagnostics of single configurations and sample batches.

from __future__ import annotations

from typing import Iterable, Sequence, Tuple

import numpy as np
from scipy import stats

from ..errors import DomainError
from .sizebias import ConfigLike, _occupations


def occupied_sites(config: ConfigLike) -> int:
    return int(np.count_nonzero(_occupations(config)))


def max_fraction(config: ConfigLike) -> float:
    """η_(1) / N."""
    occ = _occupations(config)
    N = int(occ.sum())
    if N == 0:
        raise DomainError("max fraction is undefined for N = 0")
    return float(occ.max()) / N


def phase_decomposition(config: ConfigLike, K: float) -> Tuple[float, float, float]:
    """
    (bulk mass fraction, condensed mass fraction, condensed volume fraction) with
    sites above K counted as condensed. The two mass fractions sum to 1.
    """
    if K < 0:
        raise DomainError(f"threshold must be >= 0, got {K}")
    occ = _occupations(config)
    N = int(occ.sum())
    L = occ.size
    condensed = occ > K
    volume = float(np.count_nonzero(condensed)) / L
    if N == 0:
        return 1.0, 0.0, volume
    condensed_mass = int(occ[condensed].sum())
    bulk_mass = N - condensed_mass
    return bulk_mass / N, condensed_mass / N, volume


def empirical_moment(configs: Iterable[ConfigLike], a: float) -> float:
    """Average of η_x^a over all sites of all configurations."""
    if not a > 0:
        raise DomainError(f"moment order must be > 0, got {a}")
    total = 0.0
    count = 0
    for c in configs:
        occ = _occupations(c).astype(np.float64)
        total += float(np.power(occ, a).sum())
        count += occ.size
    if count == 0:
        raise DomainError("empirical moment of an empty batch")
    return total / count


def log_slope(ns: Sequence[float], values: Sequence[float]) -> Tuple[float, float]:
    """Least-squares slope and its standard error of values against log N."""
    fit = stats.linregress(np.log(np.asarray(ns, dtype=np.float64)), np.asarray(values, dtype=np.float64))
    return float(fit.slope), float(fit.stderr)
