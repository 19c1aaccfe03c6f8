# ipcondense/dynamics/ring_dynamics.py
# Totally asymmetric Gillespie dynamics on the ring x -> x+1: inclusion process and its zero-range equivalent.

from __future__ import annotations

import logging
import math

import numpy as np
from numba import njit

from ..schemas import DynamicsKind, ModelParams
from .base_dynamics import BaseDynamics, SimState
from .rate_tree import tree_build, tree_select, tree_update

logger = logging.getLogger(__name__)

# departure-rate variants of the zero-range process
ZRP_RATE_CODES = {"inclusion": 0, "ratio": 1, "harmonic": 2}

TA_MODEL = 0
ZRP_MODEL = 1


@njit(cache=True)
def zrp_rate(n, d, variant):
    if n <= 0:
        return 0.0
    if variant == 0:
        return n / (d + n - 1.0)
    if n == 1:
        return 1.0 / d
    if variant == 1:
        return n / (n - 1.0)
    return 1.0 + 1.0 / n


@njit(cache=True)
def site_rate(occupations, x, d, model, variant):
    """Rate at which site x sends a particle to x+1 (mod L)."""
    n = occupations[x]
    if model == 0:
        L = occupations.size
        return n * (d + occupations[(x + 1) % L])
    return zrp_rate(n, d, variant)


@njit(cache=True)
def all_site_rates(occupations, d, model, variant):
    L = occupations.size
    out = np.empty(L)
    for x in range(L):
        out[x] = site_rate(occupations, x, d, model, variant)
    return out


@njit(cache=True)
def gillespie_run(occupations, tree, uniforms, pos, t, t_target, d, model, variant):
    """
    Fire events until the next one would pass t_target or the buffer runs dry.

    Returns (t, pos, events, done). Each event reads two uniforms: the holding
    time from the total rate, then the site with probability rate_x / total.
    """
    L = occupations.size
    events = 0
    while True:
        total = tree[1]
        if total <= 0.0:
            return t_target, pos, events, True
        if pos + 2 > uniforms.size:
            return t, pos, events, False
        dt = -math.log1p(-uniforms[pos]) / total
        if t + dt > t_target:
            return t_target, pos + 1, events, True
        t += dt
        x = tree_select(tree, uniforms[pos + 1] * total)
        pos += 2
        y = (x + 1) % L
        occupations[x] -= 1
        occupations[y] += 1
        events += 1
        if model == 0:
            left = (x - 1 + L) % L
            tree_update(tree, left, site_rate(occupations, left, d, model, variant))
        tree_update(tree, x, site_rate(occupations, x, d, model, variant))
        tree_update(tree, y, site_rate(occupations, y, d, model, variant))


class RingDynamics(BaseDynamics):
    model = TA_MODEL

    def variant(self, state: SimState) -> int:
        return 0

    def prepare(self, state: SimState):
        if state.tree is None:
            rates = all_site_rates(state.occupations, state.params.d, self.model, self.variant(state))
            state.tree = tree_build(rates)

    def run(self, state: SimState, t_target: float) -> SimState:
        self.prepare(state)
        if t_target <= state.time:
            return state
        d, model, variant = state.params.d, self.model, self.variant(state)
        stream = state.uniforms
        t = state.time
        done = False
        while not done:
            if stream.buffer.size - stream.pos < 2:
                stream.refill()
            t, stream.pos, fired, done = gillespie_run(
                state.config.occupations, state.tree, stream.buffer, stream.pos, t, t_target, d, model, variant
            )
            state.events += fired
            if state.debug:
                state.check_mass()
        state.time = t
        self._finish(state)
        return state

    def burn_in(self, p: ModelParams, factor: float) -> float:
        return factor * p.L / p.d


class TADynamics(RingDynamics):
    kind = DynamicsKind.TA_RING
    model = TA_MODEL


class ZRPDynamics(RingDynamics):
    kind = DynamicsKind.ZRP_RING
    model = ZRP_MODEL

    def variant(self, state: SimState) -> int:
        try:
            return ZRP_RATE_CODES[state.zrp_rates]
        except KeyError:
            raise ValueError(f"unknown zero-range rates '{state.zrp_rates}'") from None


def site_rates(state: SimState) -> np.ndarray:
    """Per-site departure rates recomputed from the occupations."""
    model = ZRP_MODEL if state.kind == DynamicsKind.ZRP_RING else TA_MODEL
    variant = ZRP_RATE_CODES.get(state.zrp_rates, 0) if model == ZRP_MODEL else 0
    return all_site_rates(state.occupations, state.params.d, model, variant)


def total_rate(state: SimState) -> float:
    return float(site_rates(state).sum())
