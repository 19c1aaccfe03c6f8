# ipcondense/dynamics/oracle.py
# Exact small-system oracle: enumerate E_{L,N}, canonical probabilities, explicit generator / kernel.

from __future__ import annotations

from itertools import combinations
from typing import Dict, Tuple

import numpy as np

from ..schemas import DynamicsKind, ModelParams
from ..weights import log_weight
from .ring_dynamics import TA_MODEL, ZRP_MODEL, ZRP_RATE_CODES, site_rate


def enumerate_configurations(L: int, N: int) -> np.ndarray:
    """All η with L sites and N particles, by stars and bars."""
    states = []
    for bars in combinations(range(N + L - 1), L - 1):
        prev = -1
        occ = []
        for b in bars:
            occ.append(b - prev - 1)
            prev = b
        occ.append(N + L - 1 - prev - 1)
        states.append(occ)
    return np.array(states, dtype=np.int64).reshape(-1, L)


def canonical_probabilities(states: np.ndarray, d: float) -> np.ndarray:
    """π_{L,N}(η) ∝ Π_x w(η_x), normalized over the given states."""
    logw = np.asarray(log_weight(states, d)).sum(axis=1)
    w = np.exp(logw - logw.max())
    return w / w.sum()


def _index(states: np.ndarray) -> Dict[Tuple[int, ...], int]:
    return {tuple(int(v) for v in s): i for i, s in enumerate(states)}


def transition_generator(p: ModelParams, kind: DynamicsKind, zrp_rates: str = "inclusion",
                         states: np.ndarray = None) -> np.ndarray:
    """
    Q over E_{L,N} with Q[a, b] the rate a -> b and rows summing to 0.

    For CG this is P - I, P the one-step kernel of the rejection dynamics:
    a particle moves x -> y (y != x) with probability (η_x / N)(d + η_y) / (dL + N).
    """
    kind = DynamicsKind(kind)
    states = enumerate_configurations(p.L, p.N) if states is None else states
    index = _index(states)
    n_states = len(states)
    Q = np.zeros((n_states, n_states))
    for a, eta in enumerate(states):
        for x in range(p.L):
            if eta[x] == 0:
                continue
            if kind == DynamicsKind.CG:
                targets = [(y, eta[x] / p.N * (p.d + eta[y]) / (p.dL + p.N)) for y in range(p.L) if y != x]
            else:
                model = TA_MODEL if kind == DynamicsKind.TA_RING else ZRP_MODEL
                rate = site_rate(eta, x, p.d, model, ZRP_RATE_CODES[zrp_rates])
                targets = [((x + 1) % p.L, rate)]
            for y, rate in targets:
                if y == x:
                    continue
                nxt = eta.copy()
                nxt[x] -= 1
                nxt[y] += 1
                Q[a, index[tuple(int(v) for v in nxt)]] += rate
        Q[a, a] = -Q[a].sum()
    return Q


def stationarity_residual(p: ModelParams, kind: DynamicsKind, zrp_rates: str = "inclusion") -> float:
    """max |(π Q)_b| for π the canonical measure."""
    states = enumerate_configurations(p.L, p.N)
    pi = canonical_probabilities(states, p.d)
    Q = transition_generator(p, kind, zrp_rates, states)
    return float(np.abs(pi @ Q).max())
