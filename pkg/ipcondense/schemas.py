# ipcondense/schemas.py
# Validated parameter objects (Pydantic): model parameters, rate-function queries, experiment config.

from __future__ import annotations

import math
from enum import Enum
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

import config
from .errors import ConfigError


class DynamicsKind(str, Enum):
    CG = "cg"
    TA_RING = "ta"
    ZRP_RING = "zrp"


class ModelParams(BaseModel):
    """Lattice size L, particle number N, and diffusion parameter d."""

    model_config = ConfigDict(frozen=True)

    L: int = Field(ge=1)
    N: int = Field(ge=0)
    d: float = Field(gt=0)

    @field_validator("d")
    @classmethod
    def _finite_d(cls, v: float):
        if not math.isfinite(v):
            raise ValueError(f"d must be finite, got {v}")
        return v

    @property
    def rho(self) -> float:
        return self.N / self.L

    @property
    def dL(self) -> float:
        return self.d * self.L

    @classmethod
    def from_dl(cls, L: int, N: int, dl: float, **kw) -> "ModelParams":
        return cls(L=L, N=N, d=dl / L, **kw)

    def with_(self, **changes) -> "ModelParams":
        return self.model_copy(update=changes)


class RateQuery(BaseModel):
    """Point at which a maximum-occupation rate function is evaluated."""

    model_config = ConfigDict(frozen=True)

    rho: float = Field(gt=0)
    m: float = Field(ge=0)
    d: Optional[float] = Field(default=None, gt=0)
    gamma: Optional[float] = Field(default=None, gt=1)

    @model_validator(mode="after")
    def _m_below_rho(self):
        if self.m >= self.rho:
            raise ValueError(f"need 0 <= m < rho, got m={self.m}, rho={self.rho}")
        return self


Command = Literal["simulate", "exact", "ldp", "gemtest", "tails", "entropy"]
Regime = Literal["fluid", "intermediate", "complete"]
Speed = Literal["L", "dL", "logL"]

ALL_STATISTICS = ("r_k", "max_fraction", "occupied_sites", "phase_decomposition", "empirical_moment", "scaled_size_biased")


class ExperimentConfig(BaseModel):
    """Full configuration of one CLI command; echoed verbatim into every output file."""

    model_config = ConfigDict(extra="forbid")

    command: Command
    L: int = Field(default=64, ge=1)
    N: Optional[int] = Field(default=None, ge=0)
    rho: Optional[float] = Field(default=None, gt=0)
    d: Optional[float] = Field(default=None, gt=0)
    dl: Optional[float] = Field(default=None, gt=0)
    kind: DynamicsKind = DynamicsKind.CG
    zrp_rates: Literal["inclusion", "ratio", "harmonic"] = "inclusion"
    seed: int = Field(default=0, ge=0, lt=2**64)
    replicas: int = Field(default=config.DEFAULT_REPLICAS, ge=0)
    resamples: int = Field(default=config.DEFAULT_RESAMPLES, ge=1)
    samples: int = Field(default=1, ge=1)
    burn_in_factor: float = Field(default=config.DEFAULT_BURN_IN_FACTOR, ge=0)
    jobs: int = Field(default=1, ge=1)
    out: Optional[Path] = None
    format: Literal["csv", "json"] = "csv"

    # exact
    truncation: Optional[int] = Field(default=None, ge=1)

    # ldp
    regime: Optional[Regime] = None
    speed: Optional[Speed] = None
    gamma: float = Field(default=2.0, gt=1)
    m_points: int = Field(default=40, ge=2)

    # gemtest / tails / statistics
    alpha: float = Field(default=1.0, gt=0)
    source: Literal["gem", "simulation"] = "gem"
    draws: int = Field(default=100_000, ge=1)
    k_max: int = Field(default=config.DEFAULT_K_MAX, ge=1)
    threshold: Optional[float] = Field(default=None, ge=0)
    moments: List[float] = Field(default_factory=lambda: [0.5, 2.0])
    statistics: List[str] = Field(default_factory=lambda: list(ALL_STATISTICS))
    tail_indices: List[int] = Field(default_factory=lambda: [1, 2, 3])

    # entropy
    L_min: int = Field(default=64, ge=1)
    L_max: int = Field(default=1024, ge=1)

    @field_validator("moments")
    @classmethod
    def _positive_moments(cls, v: List[float]):
        if any(not (a > 0) for a in v):
            raise ValueError("moment orders must be > 0")
        return v

    @field_validator("statistics")
    @classmethod
    def _known_statistics(cls, v: List[str]):
        unknown = [s for s in v if s not in ALL_STATISTICS]
        if unknown:
            raise ValueError(f"unknown statistics: {unknown}")
        return v

    @field_validator("tail_indices")
    @classmethod
    def _positive_indices(cls, v: List[int]):
        if any(i < 1 for i in v):
            raise ValueError("tail indices start at 1")
        return v

    @model_validator(mode="after")
    def _consistency(self):
        if self.d is not None and self.dl is not None:
            raise ValueError("--d and --dl are mutually exclusive")
        if self.L_min > self.L_max:
            raise ValueError("L_min must not exceed L_max")
        n = self.particle_number()
        # truncation at or above N is inactive; normalize so outputs are identical
        if self.truncation is not None and self.truncation >= n:
            self.truncation = None
        return self

    def particle_number(self) -> int:
        if self.N is not None:
            return self.N
        if self.rho is not None:
            return int(round(self.rho * self.L))
        return self.L

    def diffusion(self, L: Optional[int] = None) -> Optional[float]:
        L = self.L if L is None else L
        if self.d is not None:
            return self.d
        if self.dl is not None:
            return self.dl / L
        return None

    def model_params(self, default_d: Optional[float] = None) -> ModelParams:
        d = self.diffusion()
        if d is None:
            d = default_d
        if d is None:
            raise ConfigError(f"command '{self.command}' needs --d or --dl")
        return ModelParams(L=self.L, N=self.particle_number(), d=d)

    def echo(self) -> dict:
        return self.model_dump(mode="json")
