# ipcondense/partition.py
# Canonical partition functions Z_{l,n} (optionally truncated at max occupation M) in log space.

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional

import numpy as np
from numba import njit

import config
from .errors import BudgetExceededError
from .schemas import ModelParams
from .weights import log_weights

logger = logging.getLogger(__name__)

NEG_INF = -np.inf

HEADER_DTYPE = np.dtype([("d", "<f8"), ("maxL", "<i8"), ("maxN", "<i8"), ("truncation", "<i8")])


@njit(cache=True)
def _support(a):
    lo = -1
    hi = -1
    for i in range(a.size):
        if a[i] > -np.inf:
            if lo < 0:
                lo = i
            hi = i
    return lo, hi


@njit(cache=True)
def log_convolve(a, b, n_out):
    """out[n] = log sum_m exp(a[m] + b[n-m]) for n < n_out, with -inf for empty sums."""
    out = np.full(n_out, -np.inf)
    alo, ahi = _support(a)
    blo, bhi = _support(b)
    if alo < 0 or blo < 0:
        return out
    for n in range(alo + blo, min(n_out, ahi + bhi + 1)):
        lo = max(alo, n - bhi)
        hi = min(ahi, n - blo)
        mx = -np.inf
        for m in range(lo, hi + 1):
            v = a[m] + b[n - m]
            if v > mx:
                mx = v
        if mx == -np.inf:
            continue
        s = 0.0
        for m in range(lo, hi + 1):
            v = a[m] + b[n - m]
            if v > -np.inf:
                s += math.exp(v - mx)
        out[n] = mx + math.log(s)
    return out


@njit(cache=True)
def log_convolve_at(a, b, n):
    """Single entry log sum_m exp(a[m] + b[n-m])."""
    lo = max(0, n - (b.size - 1))
    hi = min(a.size - 1, n)
    mx = -np.inf
    for m in range(lo, hi + 1):
        v = a[m] + b[n - m]
        if v > mx:
            mx = v
    if mx == -np.inf:
        return mx
    s = 0.0
    for m in range(lo, hi + 1):
        v = a[m] + b[n - m]
        if v > -np.inf:
            s += math.exp(v - mx)
    return mx + math.log(s)


def base_row(n_max: int, d: float, truncation: Optional[int] = None) -> np.ndarray:
    """Z^{(M)}_{1,n} = w(n) 1{n <= M} for n = 0..n_max."""
    row = log_weights(n_max, d)
    if truncation is not None and truncation < n_max:
        row[truncation + 1:] = NEG_INF
    return row


def empty_row(n_max: int) -> np.ndarray:
    """Z_{0,n} = 1{n = 0}."""
    row = np.full(n_max + 1, NEG_INF)
    row[0] = 0.0
    return row


def table_bytes(max_l: int, max_n: int) -> int:
    return 8 * (max_l + 1) * (max_n + 1)


def check_budget(what: str, required: int, budget: Optional[int] = None):
    budget = config.TABLE_MEMORY_BUDGET_BYTES if budget is None else budget
    if required > budget:
        logger.error(f"{what}: {required} bytes exceed budget {budget}")
        raise BudgetExceededError(what, required, budget)


@dataclass(frozen=True)
class PartitionTable:
    """Dense table logZ[l, n], l = 0..maxL, n = 0..maxN; row 0 is Z_{0,n} = 1{n=0}."""

    d: float
    maxL: int
    maxN: int
    truncation: Optional[int]
    logZ: np.ndarray

    def __post_init__(self):
        self.logZ.setflags(write=False)

    def log_Z(self, l: int, n: int) -> float:
        if n < 0 or l < 0:
            return NEG_INF
        return float(self.logZ[l, n])

    def covers(self, p: ModelParams) -> bool:
        return p.L <= self.maxL and p.N <= self.maxN and p.d == self.d

    def require(self, p: ModelParams, untruncated: bool = True):
        if p.L > self.maxL or p.N > self.maxN:
            raise ValueError(f"table ({self.maxL}, {self.maxN}) does not cover L={p.L}, N={p.N}")
        if p.d != self.d:
            raise ValueError(f"table built for d={self.d}, params have d={p.d}")
        if untruncated and self.truncation is not None and self.truncation < p.N:
            raise ValueError("canonical marginals need an untruncated table")

    # serialization
    def save_binary(self, path: Path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        header = np.array([(self.d, self.maxL, self.maxN, -1 if self.truncation is None else self.truncation)], dtype=HEADER_DTYPE)
        with path.open("wb") as f:
            f.write(header.tobytes())
            f.write(np.ascontiguousarray(self.logZ[1:], dtype="<f8").tobytes())

    @classmethod
    def load_binary(cls, path: Path) -> "PartitionTable":
        raw = Path(path).read_bytes()
        header = np.frombuffer(raw[:HEADER_DTYPE.itemsize], dtype=HEADER_DTYPE)[0]
        max_l, max_n = int(header["maxL"]), int(header["maxN"])
        trunc = int(header["truncation"])
        body = np.frombuffer(raw[HEADER_DTYPE.itemsize:], dtype="<f8").reshape(max_l, max_n + 1)
        logz = np.vstack([empty_row(max_n)[None, :], body]).astype(np.float64)
        return cls(d=float(header["d"]), maxL=max_l, maxN=max_n, truncation=None if trunc < 0 else trunc, logZ=logz)

    def to_csv(self, path: Path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow(["l", "n", "logZ"])
            for l in range(1, self.maxL + 1):
                for n in range(self.maxN + 1):
                    w.writerow([l, n, repr(float(self.logZ[l, n]))])


def build_partition_table(p: ModelParams, truncation: Optional[int] = None, max_n: Optional[int] = None,
                          budget: Optional[int] = None, progress_callback=None) -> PartitionTable:
    """
    Fill logZ for l = 1..L, n = 0..N by Z_{l,n} = sum_m Z_{k,m} Z_{l-k,n-m} with k = l // 2.

    Args:
        p: model parameters; the table covers maxL = p.L and maxN = p.N (or max_n)
        truncation: optional maximal occupation M (Z^{(M)})
        budget: memory budget in bytes (config default)
    """
    max_l = p.L
    max_n = p.N if max_n is None else max_n
    check_budget("partition table", table_bytes(max_l, max_n), budget)

    logz = np.empty((max_l + 1, max_n + 1), dtype=np.float64)
    logz[0] = empty_row(max_n)
    logz[1] = base_row(max_n, p.d, truncation)
    for l in range(2, max_l + 1):
        k = l // 2
        logz[l] = log_convolve(logz[k], logz[l - k], max_n + 1)
        if progress_callback and l % 256 == 0:
            progress_callback(f"partition table row {l}/{max_l}")
    logger.debug(f"built partition table L={max_l} N={max_n} d={p.d} M={truncation}")
    return PartitionTable(d=p.d, maxL=max_l, maxN=max_n, truncation=truncation, logZ=logz)


class TruncatedRows:
    """
    Rows l -> log Z^{(M)}_{l, 0..n_max} computed on demand by memoized doubling.

    Only the O(log l) rows on the halving path of the requested l are stored.
    """

    def __init__(self, d: float, n_max: int, truncation: Optional[int] = None):
        self.d = d
        self.n_max = n_max
        self.truncation = truncation
        self._rows: Dict[int, np.ndarray] = {0: empty_row(n_max)}
        if truncation is None or truncation >= 0:
            self._rows[1] = base_row(n_max, d, truncation)
        else:
            self._rows[1] = np.full(n_max + 1, NEG_INF)

    def row(self, l: int) -> np.ndarray:
        cached = self._rows.get(l)
        if cached is not None:
            return cached
        k = l // 2
        out = log_convolve(self.row(k), self.row(l - k), self.n_max + 1)
        self._rows[l] = out
        return out

    def log_Z(self, l: int, n: int) -> float:
        if n < 0 or n > self.n_max or l < 0:
            return NEG_INF
        if l <= 1 or l in self._rows:
            return float(self.row(l)[n])
        k = l // 2
        return float(log_convolve_at(self.row(k), self.row(l - k), n))


def truncated_log_Z_row(l: int, n_max: int, d: float, truncation: Optional[int] = None) -> np.ndarray:
    """log Z^{(M)}_{l, n} for n = 0..n_max without materializing the full table."""
    return TruncatedRows(d, n_max, truncation).row(l).copy()


class ExactMaxRows:
    """
    Rows for configurations whose maximum is exactly M, next to Z^{(M)} and Z^{(M-1)}.

    D_l = D_k * Z^{(M)}_{l-k} + Z^{(M-1)}_k * D_{l-k}; every term is nonnegative,
    so the point mass of the maximum needs no cancellation.
    """

    def __init__(self, d: float, n_max: int, M: int, upto: Optional[TruncatedRows] = None,
                 below: Optional[TruncatedRows] = None):
        self.n_max = n_max
        self.M = M
        self.upto = upto if upto is not None else TruncatedRows(d, n_max, M)
        self.below = below if below is not None else TruncatedRows(d, n_max, M - 1)
        first = np.full(n_max + 1, NEG_INF)
        if M <= n_max:
            first[M] = self.upto.row(1)[M]
        self._rows: Dict[int, np.ndarray] = {0: np.full(n_max + 1, NEG_INF), 1: first}

    def row(self, l: int) -> np.ndarray:
        cached = self._rows.get(l)
        if cached is not None:
            return cached
        k = l // 2
        out = self._combine(k, l - k)
        self._rows[l] = out
        return out

    def _combine(self, a: int, b: int, at: Optional[int] = None):
        da, db = self.row(a), self.row(b)
        if a == b:
            both = np.logaddexp(self.upto.row(b), self.below.row(a))
            if at is not None:
                return log_convolve_at(da, both, at)
            return log_convolve(da, both, self.n_max + 1)
        if at is not None:
            return np.logaddexp(log_convolve_at(da, self.upto.row(b), at),
                                log_convolve_at(self.below.row(a), db, at))
        return np.logaddexp(log_convolve(da, self.upto.row(b), self.n_max + 1),
                            log_convolve(self.below.row(a), db, self.n_max + 1))

    def log_D(self, l: int, n: int) -> float:
        if l in self._rows or l <= 1:
            return float(self.row(l)[n])
        k = l // 2
        return float(self._combine(k, l - k, at=n))
