# ipcondense/stats/gem.py
# GEM(α) stick-breaking and Poisson-Dirichlet PD(α) reference samplers.

from __future__ import annotations

import math
from typing import Optional, Tuple

import numpy as np

from config import GEM_RESIDUAL_TOLERANCE
from ..errors import DomainError
from .sizebias import UnitPartition


def _check_alpha(alpha: float):
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")


def beta_one_alpha(alpha: float, r: np.ndarray) -> np.ndarray:
    """Inverse CDF of Beta(1, α): U = 1 - (1 - R)^(1/α)."""
    return -np.expm1(np.log1p(-r) / alpha)


def k_for_residual(alpha: float, tol: float = GEM_RESIDUAL_TOLERANCE) -> int:
    """Number of breaks after which the mean residual (α/(1+α))^k drops below tol."""
    _check_alpha(alpha)
    return max(1, int(math.ceil(math.log(tol) / math.log(alpha / (1.0 + alpha)))))


def expected_residual(alpha: float, k: int) -> float:
    """E[Π_{i≤k} (1 - U_i)] = (α/(1+α))^k."""
    return (alpha / (1.0 + alpha)) ** k


def sample_gem_batch(alpha: float, k_max: int, n: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """n independent draws: V of shape (n, k_max) and the residual mass after k_max breaks."""
    _check_alpha(alpha)
    u = beta_one_alpha(alpha, rng.random((n, k_max)))
    remaining = np.cumprod(1.0 - u, axis=1)
    before = np.hstack([np.ones((n, 1)), remaining[:, :-1]])
    return u * before, remaining[:, -1].copy()


def sample_gem(alpha: float, k_max: int, rng: np.random.Generator) -> UnitPartition:
    """V_1..V_{k_max} with V_j = U_j Π_{i<j}(1 - U_i), plus the residual."""
    v, residual = sample_gem_batch(alpha, k_max, 1, rng)
    return UnitPartition(v[0], float(residual[0]))


def sample_pd(alpha: float, k_max: Optional[int], rng: np.random.Generator,
              tol: float = GEM_RESIDUAL_TOLERANCE) -> UnitPartition:
    """
    GEM parts sorted nonincreasing. Breaking continues past k_max until the
    residual is at most tol.
    """
    k = max(k_max or 0, k_for_residual(alpha, tol))
    gem = sample_gem(alpha, k, rng)
    parts = [gem.parts]
    residual = gem.residual
    while residual > tol:
        more = sample_gem(alpha, k, rng)
        parts.append(residual * more.parts)
        residual *= more.residual
    return UnitPartition(np.concatenate(parts), residual).sorted()
