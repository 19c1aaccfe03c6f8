# ipcondense/dynamics/base_dynamics.py
# Base interface for every dynamics: a seeded SimState in, the same state advanced to t_target out.

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from config import DEBUG_MASS_CHECK, UNIFORM_CHUNK
from ..schemas import DynamicsKind, ModelParams

logger = logging.getLogger(__name__)


@dataclass
class Configuration:
    occupations: np.ndarray                # int64, length L
    total: int                             # cached N
    seed: Optional[int] = None             # stream seed that produced it, if sampled
    time: Optional[float] = None           # process time at which it was recorded

    @classmethod
    def from_occupations(cls, occupations, **kw) -> "Configuration":
        occ = np.asarray(occupations, dtype=np.int64).copy()
        return cls(occupations=occ, total=int(occ.sum()), **kw)

    @property
    def L(self) -> int:
        return int(self.occupations.size)

    def copy(self, **kw) -> "Configuration":
        out = Configuration(self.occupations.copy(), self.total, self.seed, self.time)
        for k, v in kw.items():
            setattr(out, k, v)
        return out

    def check_mass(self):
        s = int(self.occupations.sum())
        if s != self.total or (self.occupations < 0).any():
            raise AssertionError(f"mass check failed: sum {s}, expected {self.total}")


class UniformStream:
    """
    Uniforms on [0, 1) drawn from the state's generator in fixed chunks.

    Kernels read a contiguous buffer and report how far they got; the stream is
    the same however its consumption is split across calls.
    """

    def __init__(self, rng: np.random.Generator, chunk: int = UNIFORM_CHUNK):
        self.rng = rng
        self.chunk = int(chunk)
        self.buffer = np.empty(0, dtype=np.float64)
        self.pos = 0

    def refill(self):
        fresh = self.rng.random(self.chunk)
        self.buffer = np.concatenate([self.buffer[self.pos:], fresh])
        self.pos = 0

    def take(self, k: int) -> np.ndarray:
        while self.buffer.size - self.pos < k:
            self.refill()
        out = self.buffer[self.pos:self.pos + k]
        self.pos += k
        return out


@dataclass
class SimState:
    config: Configuration
    params: ModelParams
    kind: DynamicsKind
    seed: int
    rng: np.random.Generator
    time: float = 0.0
    zrp_rates: str = "inclusion"
    debug: bool = DEBUG_MASS_CHECK
    positions: Optional[np.ndarray] = None     # CG particle index: site of particle i
    tree: Optional[np.ndarray] = None          # TA / ZRP per-site rate tree
    steps: int = 0                             # CG attempted steps
    events: int = 0                            # TA / ZRP fired events
    uniforms: UniformStream = field(init=False)

    def __post_init__(self):
        self.uniforms = UniformStream(self.rng)

    @property
    def occupations(self) -> np.ndarray:
        return self.config.occupations

    def snapshot(self) -> Configuration:
        return self.config.copy(seed=self.seed, time=self.time)

    def check_mass(self):
        self.config.check_mass()
        if self.positions is not None:
            derived = np.bincount(self.positions, minlength=self.params.L)
            if not np.array_equal(derived, self.config.occupations):
                raise AssertionError("particle index disagrees with occupations")


class BaseDynamics:
    kind: DynamicsKind

    def can_handle(self, kind: DynamicsKind) -> bool:
        return kind == self.kind

    def prepare(self, state: SimState):
        """Build kernel-side structures (particle index, rate tree) for a fresh state."""
        raise NotImplementedError

    def run(self, state: SimState, t_target: float) -> SimState:
        raise NotImplementedError

    def burn_in(self, p: ModelParams, factor: float) -> float:
        raise NotImplementedError

    def _finish(self, state: SimState):
        if state.debug:
            state.check_mass()
