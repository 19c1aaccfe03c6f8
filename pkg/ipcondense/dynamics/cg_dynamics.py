# ipcondense/dynamics/cg_dynamics.py
# Rejection dynamics on the complete graph: relocate with probability dL/(dL+N), otherwise join a random particle.

from __future__ import annotations

import logging
import math

import numpy as np
from numba import njit

from config import UNIFORM_CHUNK
from ..schemas import DynamicsKind, ModelParams
from .base_dynamics import BaseDynamics, SimState

logger = logging.getLogger(__name__)

UNIFORMS_PER_STEP = 3


@njit(cache=True)
def cg_steps(positions, occupations, uniforms, n_steps, L, p_relocate):
    """
    n_steps attempted moves; step s reads uniforms[3s .. 3s+2].

    Particle i goes to a uniform site (its own allowed) with probability
    p_relocate, otherwise to the site of a uniform particle j (j = i allowed).
    """
    N = positions.size
    for s in range(n_steps):
        u = 3 * s
        i = min(int(uniforms[u] * N), N - 1)
        if uniforms[u + 1] < p_relocate:
            y = min(int(uniforms[u + 2] * L), L - 1)
        else:
            j = min(int(uniforms[u + 2] * N), N - 1)
            y = positions[j]
        x = positions[i]
        if x != y:
            occupations[x] -= 1
            occupations[y] += 1
            positions[i] = y


class CGDynamics(BaseDynamics):
    kind = DynamicsKind.CG

    def prepare(self, state: SimState):
        if state.positions is None:
            state.positions = np.repeat(np.arange(state.params.L, dtype=np.int64), state.occupations)

    @staticmethod
    def step_rate(p: ModelParams) -> float:
        """Attempted steps per unit time, N (dL + N)."""
        return p.N * (p.dL + p.N)

    def run(self, state: SimState, t_target: float) -> SimState:
        self.prepare(state)
        p = state.params
        if p.N == 0 or t_target <= state.time:
            state.time = max(state.time, t_target)
            return state

        rate = self.step_rate(p)
        target_steps = int(math.ceil(t_target * rate))
        remaining = target_steps - state.steps
        p_relocate = p.dL / (p.dL + p.N)
        batch = max(1, UNIFORM_CHUNK // UNIFORMS_PER_STEP)
        while remaining > 0:
            n = min(batch, remaining)
            u = state.uniforms.take(UNIFORMS_PER_STEP * n)
            cg_steps(state.positions, state.config.occupations, u, n, p.L, p_relocate)
            state.steps += n
            remaining -= n
            if state.debug:
                state.check_mass()
        state.time = max(state.time, t_target, state.steps / rate)
        self._finish(state)
        return state

    def burn_in(self, p: ModelParams, factor: float) -> float:
        return factor * p.L
