# ipcondense/marginals.py
# Canonical and size-biased single-site / k-site marginals from partition functions.

from __future__ import annotations

import logging
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError
from .partition import PartitionTable
from .schemas import ModelParams
from .weights import log_weight, log_weights, log_Z_closed_form

logger = logging.getLogger(__name__)


def _log_z(p: ModelParams, table: Optional[PartitionTable], l: int, n: int) -> float:
    if n < 0 or l < 0:
        return -np.inf
    if table is None:
        return log_Z_closed_form(l, n, p.d)
    return table.log_Z(l, n)


def _log_z_row(p: ModelParams, table: Optional[PartitionTable], l: int) -> np.ndarray:
    """log Z_{l, n} for n = 0..N."""
    if table is not None:
        return np.asarray(table.logZ[l, : p.N + 1], dtype=np.float64)
    return np.array([log_Z_closed_form(l, n, p.d) for n in range(p.N + 1)])


def _check(p: ModelParams, table: Optional[PartitionTable]):
    if table is not None:
        table.require(p)


def log_canonical_marginal(p: ModelParams, table: Optional[PartitionTable] = None) -> np.ndarray:
    """log π_{L,N}[η_1 = n] for n = 0..N; the table may be omitted to use the closed form."""
    _check(p, table)
    if p.L == 1:
        out = np.full(p.N + 1, -np.inf)
        out[p.N] = 0.0
        return out
    log_rest = _log_z_row(p, table, p.L - 1)[::-1]
    return log_weights(p.N, p.d) + log_rest - _log_z(p, table, p.L, p.N)


def canonical_marginal(p: ModelParams, table: Optional[PartitionTable] = None) -> np.ndarray:
    return np.exp(log_canonical_marginal(p, table))


def canonical_marginal_pmf(n: int, p: ModelParams, table: Optional[PartitionTable] = None) -> float:
    """w(n) Z_{L-1,N-n} / Z_{L,N}."""
    if n < 0 or n > p.N:
        return 0.0
    _check(p, table)
    if p.L == 1:
        return 1.0 if n == p.N else 0.0
    log_p = log_weight(n, p.d) + _log_z(p, table, p.L - 1, p.N - n) - _log_z(p, table, p.L, p.N)
    return float(np.exp(log_p))


def size_biased_marginal(p: ModelParams, table: Optional[PartitionTable] = None) -> np.ndarray:
    if p.N == 0:
        raise DomainError("size-biased marginal is undefined for N = 0")
    ns = np.arange(p.N + 1, dtype=np.float64)
    return (p.L / p.N) * ns * canonical_marginal(p, table)


def size_biased_marginal_pmf(n: int, p: ModelParams, table: Optional[PartitionTable] = None) -> float:
    """(L/N) n w(n) Z_{L-1,N-n} / Z_{L,N}."""
    if p.N == 0:
        raise DomainError("size-biased marginal is undefined for N = 0")
    if n <= 0:
        return 0.0
    return (p.L / p.N) * n * canonical_marginal_pmf(n, p, table)


def size_biased_joint_pmf(ns: Sequence[int], p: ModelParams, table: Optional[PartitionTable] = None) -> float:
    """
    Joint law of the first k entries of a size-biased permutation.

    L(L-1)..(L-k+1) / (N(N-n_1)..(N-n_1-..-n_{k-1})) * prod n_i w(n_i) * Z_{L-k,N-sum n}/Z_{L,N}.

    Once all N particles are picked the remaining entries are empty sites, so a
    tuple (n_1..n_j, 0, ..., 0) with n_1 + .. + n_j = N has the probability of its
    occupied prefix; any other tuple containing a zero has probability 0.
    """
    ns = [int(v) for v in ns]
    k = len(ns)
    if k == 0:
        return 1.0
    if k > p.L:
        raise DomainError(f"k = {k} exceeds L = {p.L}")
    if p.N == 0:
        return 1.0 if all(v == 0 for v in ns) else 0.0
    if any(v < 0 for v in ns):
        return 0.0
    _check(p, table)

    if 0 in ns:
        j = ns.index(0)
        if sum(ns[:j]) != p.N or any(ns[j:]):
            return 0.0
        ns = ns[:j]
        k = j
        if k == 0:
            return 0.0

    total = sum(ns)
    if total > p.N:
        return 0.0
    log_p = 0.0
    remaining = p.N
    for i, n in enumerate(ns):
        log_p += np.log(p.L - i) - np.log(remaining) + np.log(n) + log_weight(n, p.d)
        remaining -= n
    log_p += _log_z(p, table, p.L - k, p.N - total) - _log_z(p, table, p.L, p.N)
    return float(np.exp(log_p))


def canonical_moment(p: ModelParams, a: float, table: Optional[PartitionTable] = None) -> float:
    """Exact <η_x^a> under π_{L,N}."""
    if not a > 0:
        raise DomainError(f"moment order must be > 0, got {a}")
    ns = np.arange(p.N + 1, dtype=np.float64)
    log_pmf = log_canonical_marginal(p, table)
    with np.errstate(divide="ignore"):
        terms = a * np.log(ns) + log_pmf
    return float(np.exp(logsumexp(terms)))


def exact_phase_decomposition(p: ModelParams, K: int, table: Optional[PartitionTable] = None):
    """
    Expected (bulk mass fraction, condensed mass fraction, condensed volume fraction)
    for threshold K under π_{L,N}.
    """
    if K < 0:
        raise DomainError(f"threshold must be >= 0, got {K}")
    if p.N == 0:
        return 1.0, 0.0, 0.0
    pmf = canonical_marginal(p, table)
    ns = np.arange(p.N + 1, dtype=np.float64)
    cut = min(K, p.N) + 1
    bulk = float(p.L / p.N * np.dot(ns[:cut], pmf[:cut]))
    bulk = min(bulk, 1.0)
    volume = float(pmf[cut:].sum())
    return bulk, 1.0 - bulk, volume
