# ipcondense/weights.py
# Stationary weights, closed-form partition function, grand-canonical quantities and asymptotics.

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.special import gammaln, xlogy

from .errors import DomainError
from .schemas import ModelParams


def log_weight(n, d: float):
    """log w(n) = logΓ(n+d) - logΓ(n+1) - logΓ(d); accepts scalars or arrays."""
    n = np.asarray(n, dtype=np.float64)
    out = gammaln(n + d) - gammaln(n + 1.0) - gammaln(d)
    return float(out) if out.ndim == 0 else out


def log_weights(n_max: int, d: float) -> np.ndarray:
    """log w(0..n_max) as a float64 array."""
    return np.asarray(log_weight(np.arange(n_max + 1), d), dtype=np.float64).reshape(-1)


def log_Z_closed_form(L: int, N: int, d: float) -> float:
    if L == 0:
        return 0.0 if N == 0 else -math.inf
    if N < 0:
        return -math.inf
    dl = d * L
    return float(gammaln(N + dl) - gammaln(N + 1.0) - gammaln(dl))


def log_Z_closed(p: ModelParams) -> float:
    """Closed form log Z_{L,N} = logΓ(N+dL) - logΓ(N+1) - logΓ(dL)."""
    return log_Z_closed_form(p.L, p.N, p.d)


def density_R(phi: float, d: float) -> float:
    if not (0.0 <= phi < 1.0):
        raise DomainError(f"fugacity must lie in [0, 1), got {phi}")
    return d * phi / (1.0 - phi)


def fugacity_Phi(rho: float, d: float) -> float:
    if rho < 0:
        raise DomainError(f"density must be >= 0, got {rho}")
    return rho / (d + rho)


@dataclass(frozen=True)
class GrandCanonical:
    phi: float
    d: float

    def __post_init__(self):
        if not (0.0 <= self.phi < 1.0):
            raise DomainError(f"fugacity must lie in [0, 1), got {self.phi}")
        if not self.d > 0:
            raise DomainError(f"d must be > 0, got {self.d}")

    @classmethod
    def at_density(cls, rho: float, d: float) -> "GrandCanonical":
        return cls(phi=fugacity_Phi(rho, d), d=d)

    @property
    def log_z(self) -> float:
        # z(phi) = (1 - phi)^(-d)
        return -self.d * math.log1p(-self.phi)

    @property
    def density(self) -> float:
        return density_R(self.phi, self.d)

    def log_pmf(self, n):
        n = np.asarray(n, dtype=np.float64)
        out = log_weight(n, self.d) + xlogy(n, self.phi) - self.log_z
        return out

    def pmf(self, n):
        out = np.exp(self.log_pmf(n))
        return float(out) if np.ndim(out) == 0 else out

    def support_cutoff(self, eps: float = 1e-16) -> int:
        """n beyond which the remaining mass is negligible (geometric envelope)."""
        if self.phi == 0.0:
            return 0
        # tail dominated by phi^n n^(d-1); pad the geometric estimate
        base = math.log(eps) / math.log(self.phi)
        return int(math.ceil(base + 10.0 * (1.0 + self.d) / (1.0 - self.phi))) + 10


def grand_canonical_pmf(n, gc: GrandCanonical):
    """ν_φ[η_x = n] = w(n) φ^n / z(φ)."""
    return gc.pmf(n)


def relative_entropy_rate(p: ModelParams, phi: float) -> float:
    """(1/L) H(π_{L,N} | ν_φ) = log z(φ) - (N/L) log φ - (1/L) log Z_{L,N}."""
    if not (0.0 < phi < 1.0):
        raise DomainError(f"fugacity must lie in (0, 1), got {phi}")
    gc = GrandCanonical(phi=phi, d=p.d)
    return gc.log_z - p.rho * math.log(phi) - log_Z_closed(p) / p.L


AsymptoticRegime = Literal["dL_to_alpha", "dL_to_infinity", "dL_to_zero"]


def log_Z_asymptotic(p: ModelParams, regime: AsymptoticRegime) -> float:
    """Leading-order asymptotics of log Z_{L,N}; for validation against log_Z_closed only."""
    N, a = p.N, p.dL
    if N <= 0:
        raise DomainError("asymptotics need N >= 1")
    if regime == "dL_to_alpha":
        return (a - 1.0) * math.log(N) - float(gammaln(a))
    if regime == "dL_to_zero":
        return math.log(p.d) + a * math.log(N) - math.log(p.rho)
    if regime == "dL_to_infinity":
        return (
            -1.0
            - 0.5 * math.log(2.0 * math.pi * a)
            + (a - 1.0) * math.log(N / a)
            + (N + a) * math.log1p(a / N)
        )
    raise DomainError(f"unknown regime {regime!r}")


def log_Z_ratio_asymptotic(p: ModelParams, n: int) -> float:
    """log of Z_{L-1,N-n}/Z_{L,N} in the intermediate regime d -> 0, dL -> inf."""
    N, L, a = p.N, p.L, p.dL
    return a * math.log1p(-n / N) + a * math.log1p(1.0 / L) - n * math.log1p(a / N)


def log_Z_ratio(p: ModelParams, n: int) -> float:
    """Exact log Z_{L-1,N-n}/Z_{L,N} from the closed form (d held fixed)."""
    return log_Z_closed_form(p.L - 1, p.N - n, p.d) - log_Z_closed(p)
