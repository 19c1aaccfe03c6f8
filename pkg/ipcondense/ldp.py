# ipcondense/ldp.py
# Rate functions of the maximum occupation and exact finite-size numerics of its law.

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import permutations
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy import integrate

from config import PREFACTOR_REL_TOLERANCE
from .errors import DomainError, UnsupportedRegimeError
from .partition import ExactMaxRows, TruncatedRows, check_budget, table_bytes
from .schemas import ModelParams, RateQuery, Regime, Speed
from .weights import log_weight

logger = logging.getLogger(__name__)

REGIME_SPEED: Dict[str, str] = {"fluid": "L", "intermediate": "dL", "complete": "logL"}


# closed-form rate functions

def _check_below_rho(rho: float, m: float):
    if not 0.0 <= m < rho:
        raise DomainError(f"need 0 <= m < rho, got m={m}, rho={rho}")


def rate_fluid(q: RateQuery) -> float:
    """(ρ-m) log((ρ-m)/(ρ-m+d)) - ρ log(ρ/(ρ+d)) - d log((ρ-m+d)/(ρ+d)), d fixed."""
    if q.d is None:
        raise DomainError("fluid rate needs d")
    rho, m, d = q.rho, q.m, q.d
    r = rho - m
    return -r * math.log1p(d / r) + rho * math.log1p(d / rho) - d * math.log1p(-m / (rho + d))


def rate_intermediate(rho: float, m: float) -> float:
    """log(ρ/(ρ-m)), at speed dL."""
    _check_below_rho(rho, m)
    return -math.log1p(-m / rho)


def rate_complete(rho: float, m: float, gamma: float) -> float:
    """(⌈ρ/m⌉ - 1) γ - (⌈ρ/m⌉ - 2), at speed log L with d = L^-γ."""
    if not m > 0:
        raise DomainError(f"complete-condensation rate needs m > 0, got {m}")
    if m > rho:
        raise DomainError(f"need m <= rho, got m={m}, rho={rho}")
    if not gamma > 1:
        raise DomainError(f"gamma must be > 1, got {gamma}")
    k = math.ceil(rho / m)
    return (k - 1) * gamma - (k - 2)


def closed_form_rate(regime: Regime, rho: float, m: float, d: Optional[float] = None,
                     gamma: Optional[float] = None) -> float:
    if regime == "fluid":
        return rate_fluid(RateQuery(rho=rho, m=m, d=d))
    if regime == "intermediate":
        return rate_intermediate(rho, m)
    if regime == "complete":
        return rate_complete(rho, m, gamma)
    raise UnsupportedRegimeError(f"unknown regime {regime!r}")


# exact law of the maximum

@dataclass(frozen=True)
class MaxDistribution:
    """P[η_(1) = M] and P[η_(1) <= M] at the listed M (all of 0..N unless a grid was requested)."""

    L: int
    N: int
    d: float
    ms: np.ndarray
    probs: np.ndarray
    cdf: np.ndarray

    @property
    def is_full(self) -> bool:
        return self.ms.size == self.N + 1

    def prob(self, M: int) -> float:
        hit = np.flatnonzero(self.ms == M)
        if hit.size == 0:
            raise KeyError(f"M={M} was not evaluated")
        return float(self.probs[hit[0]])


def exact_max_distribution(p: ModelParams, ms: Optional[Sequence[int]] = None, budget: Optional[int] = None,
                           progress_callback: Optional[Callable[[str], None]] = None) -> MaxDistribution:
    """
    Exact law of the maximum occupation.

    P[max <= M] = Z^{(M)}_{L,N} / Z_{L,N} from truncated rows; P[max = M] from the
    rows of configurations with maximum exactly M, which equals the first
    difference of the CDF without subtracting nearly equal numbers.
    """
    check_budget("max-occupation tables", table_bytes(p.L, p.N), budget)
    full = ms is None
    grid = np.arange(p.N + 1) if full else np.asarray(sorted(set(int(m) for m in ms)), dtype=np.int64)
    if grid.size and (grid.min() < 0 or grid.max() > p.N):
        raise DomainError(f"M values must lie in [0, {p.N}]")

    log_z = TruncatedRows(p.d, p.N, None).log_Z(p.L, p.N)
    probs = np.zeros(grid.size)
    cdf = np.zeros(grid.size)
    below = None
    prev_m = None
    for i, M in enumerate(grid):
        M = int(M)
        if below is None or prev_m != M - 1:
            below = TruncatedRows(p.d, p.N, M - 1)
        upto = TruncatedRows(p.d, p.N, M)
        rows = ExactMaxRows(p.d, p.N, M, upto=upto, below=below)
        probs[i] = math.exp(rows.log_D(p.L, p.N) - log_z)
        cdf[i] = min(1.0, math.exp(upto.log_Z(p.L, p.N) - log_z))
        below, prev_m = upto, M
        if progress_callback and (i + 1) % 32 == 0:
            progress_callback(f"max distribution {i + 1}/{grid.size}")
    logger.debug(f"max distribution L={p.L} N={p.N} d={p.d} points={grid.size}")
    return MaxDistribution(L=p.L, N=p.N, d=p.d, ms=grid, probs=probs, cdf=cdf)


def max_distribution_bounds(p: ModelParams, M: int):
    """(w(M) Z^{(M)}_{L-1,N-M} / Z_{L,N}, L times that): the sandwich around P[max = M]."""
    if not 0 <= M <= p.N:
        raise DomainError(f"M must lie in [0, {p.N}]")
    log_z = TruncatedRows(p.d, p.N, None).log_Z(p.L, p.N)
    rest = TruncatedRows(p.d, p.N, M).log_Z(p.L - 1, p.N - M)
    lower = math.exp(log_weight(M, p.d) + rest - log_z)
    return lower, p.L * lower


def speed_value(p: ModelParams, speed: Speed) -> float:
    if speed == "L":
        return float(p.L)
    if speed == "dL":
        return p.dL
    if speed == "logL":
        if p.L < 2:
            raise DomainError("speed log L needs L >= 2")
        return math.log(p.L)
    raise UnsupportedRegimeError(f"unknown speed {speed!r}")


def empirical_rate(p: ModelParams, speed: Speed, ms: Optional[Sequence[int]] = None,
                   method: str = "exact", dist: Optional[MaxDistribution] = None):
    """
    (m = M/L, -(1/speed) log P[η_(1) = M]) on the M grid; entries with P = 0 are +inf.

    method "upper_bound" uses L w(M) Z^{(M)}_{L-1,N-M} / Z_{L,N} instead of the exact mass.
    """
    s = speed_value(p, speed)
    if method == "exact":
        dist = dist if dist is not None else exact_max_distribution(p, ms)
        grid, probs = dist.ms, dist.probs
    elif method == "upper_bound":
        grid = np.arange(p.N + 1) if ms is None else np.asarray(sorted(set(int(m) for m in ms)))
        probs = np.array([max_distribution_bounds(p, int(M))[1] for M in grid])
    else:
        raise ValueError(f"unknown method {method!r}")
    with np.errstate(divide="ignore"):
        est = -np.log(probs) / s
    return grid / p.L, est


def rate_grid(regime: Regime, rho: float, points: int) -> np.ndarray:
    """m grid on [0, ρ) (on (0, ρ) for the complete case), skipping the staircase jumps ρ/k."""
    if regime == "complete":
        ms = rho * np.arange(1, points + 1) / (points + 1)
        jumps = rho / np.arange(1, points + 2)
        keep = np.array([np.abs(jumps - m).min() > 1e-9 * rho for m in ms])
        return ms[keep]
    return rho * np.arange(points) / points


def rate_curve(regime: Regime, p: ModelParams, speed: Optional[Speed] = None, gamma: Optional[float] = None,
               ms: Optional[Sequence[float]] = None, points: int = 40,
               progress_callback: Optional[Callable[[str], None]] = None) -> List[dict]:
    """Rows (m, closed_form, finite_size_estimate, L, d, speed) for one regime."""
    speed = REGIME_SPEED[regime] if speed is None else speed
    if REGIME_SPEED.get(regime) != speed:
        raise UnsupportedRegimeError(f"regime '{regime}' is not defined at speed '{speed}'")
    if regime == "complete" and gamma is None:
        raise UnsupportedRegimeError("complete regime needs gamma")
    rho = p.rho
    m_values = rate_grid(regime, rho, points) if ms is None else np.asarray(ms, dtype=np.float64)
    big_ms = [int(round(m * p.L)) for m in m_values]
    dist = exact_max_distribution(p, big_ms, progress_callback=progress_callback)
    s = speed_value(p, speed)
    rows = []
    for m, M in zip(m_values, big_ms):
        closed = closed_form_rate(regime, rho, float(m), d=p.d, gamma=gamma)
        prob = dist.prob(M)
        est = -math.log(prob) / s if prob > 0 else math.inf
        rows.append({"m": float(m), "M": M, "closed_form": closed, "finite_size_estimate": est,
                     "L": p.L, "d": p.d, "speed": speed})
    return rows


# complete condensation: size-biased joint limit and the prefactor C(x)

def condensed_joint_limit(xs: Sequence[float], rho: float) -> float:
    """ρ^{-k} Π_i (1 - x_i)^{i-k-1}, the limit of d^{-k} times the k-site size-biased joint."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.size == 0:
        raise DomainError("need at least one fraction")
    if (xs <= 0).any() or (xs >= 1).any():
        raise DomainError("fractions must lie in (0, 1)")
    k = xs.size
    i = np.arange(1, k + 1)
    return float(rho ** (-k) * np.prod((1.0 - xs) ** (i - k - 1)))


def _prefactor_order(x: float) -> int:
    if not 0.0 < x < 1.0:
        raise DomainError(f"x must lie in (0, 1), got {x}")
    c = math.ceil(1.0 / x)
    if c > 4:
        raise UnsupportedRegimeError(f"C(x) is only implemented for ceil(1/x) <= 4, got {c}")
    return c - 1


def _permuted_integrand(masses: np.ndarray, k: int) -> np.ndarray:
    """
    Σ over orders σ of the k+1 masses of Π_{i≤k} (1 - x_i^σ)^{i-k-1}, where x_i^σ is the
    fraction of the still unpicked mass taken by the i-th pick. masses: (..., k+1).
    """
    total = np.zeros(masses.shape[:-1])
    exps = np.arange(1, k + 1) - k - 1
    for sigma in permutations(range(k + 1)):
        picked = masses[..., list(sigma)]
        left = 1.0 - np.cumsum(picked, axis=-1)
        before = np.concatenate([np.ones(left.shape[:-1] + (1,)), left[..., :-1]], axis=-1)
        ratio = left[..., :k] / before[..., :k]
        total = total + np.prod(ratio ** exps, axis=-1)
    return total


def _masses(x: float, ys: Sequence[float]) -> np.ndarray:
    ys = np.asarray(ys, dtype=np.float64)
    return np.concatenate([[x], ys, [1.0 - x - ys.sum()]])


def _bounds(x: float, k: int, j: int, outer: Sequence[float]):
    """Range of y_j given y_2..y_{j-1}: y_j is the largest of the k+2-j masses still to place."""
    rem = 1.0 - x - float(sum(outer))
    prev = outer[-1] if len(outer) else x
    return [rem / (k + 2 - j), min(prev, rem)]


def prefactor_C(x: float, tol: float = PREFACTOR_REL_TOLERANCE) -> float:
    """
    C(x) of the maximum's law in the complete-condensation regime, ceil(1/x) <= 4.

    1/(x(1-x)) for x in [1/2, 1); otherwise the permutation-summed integral over
    ordered masses x = y_1 >= y_2 >= ... >= y_{k+1}, by adaptive quadrature.
    """
    k = _prefactor_order(x)
    if k == 1:
        return 1.0 / (x * (1.0 - x))

    def f(*args):
        ys = args[::-1]                      # nquad passes innermost first: y_k, ..., y_2
        return float(_permuted_integrand(_masses(x, ys), k))

    ranges = []
    for j in range(k, 1, -1):
        def limits(*outer_rev, j=j):
            return _bounds(x, k, j, outer_rev[::-1])
        ranges.append(limits)
    value, err = integrate.nquad(f, ranges, opts={"epsrel": tol * 0.1, "epsabs": 0.0})
    logger.debug(f"C({x}) = {value} (quadrature error {err})")
    return float(value)


def prefactor_C_monte_carlo(x: float, n: int, rng: np.random.Generator) -> float:
    """
    Monte-Carlo estimate of the same integral: y_j drawn uniformly within its
    conditional range, weighted by the product of range widths.
    """
    k = _prefactor_order(x)
    if k == 1:
        return 1.0 / (x * (1.0 - x))
    ys = np.empty((n, k - 1))
    weight = np.ones(n)
    prev = np.full(n, x)
    used = np.zeros(n)
    for col, j in enumerate(range(2, k + 1)):
        rem = 1.0 - x - used
        lo = rem / (k + 2 - j)
        hi = np.minimum(prev, rem)
        y = lo + (hi - lo) * rng.random(n)
        weight *= hi - lo
        ys[:, col] = y
        prev = y
        used = used + y
    masses = np.column_stack([np.full(n, x), ys, 1.0 - x - used])
    return float(np.mean(weight * _permuted_integrand(masses, k)))
