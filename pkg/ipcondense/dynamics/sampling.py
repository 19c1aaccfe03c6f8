# ipcondense/dynamics/sampling.py
# Seeded initial states, burn-in policy, stationary sampling, snapshots and replica fan-out.

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Tuple

import numpy as np

from config import DEFAULT_BURN_IN_FACTOR
from ..schemas import DynamicsKind, ModelParams
from .base_dynamics import Configuration, SimState
from .router import default_router

logger = logging.getLogger(__name__)


def derive_seed(master: int, index: int) -> int:
    """Stream seed for replica `index`: first 64-bit word of SeedSequence([master, index])."""
    return int(np.random.SeedSequence([int(master), int(index)]).generate_state(1, np.uint64)[0])


def init_uniform(p: ModelParams, seed: int, kind: DynamicsKind = DynamicsKind.CG,
                 zrp_rates: str = "inclusion", debug: Optional[bool] = None) -> SimState:
    """Every particle on an independent uniform site."""
    rng = np.random.default_rng(int(seed))
    positions = rng.integers(0, p.L, size=p.N, dtype=np.int64)
    occ = np.bincount(positions, minlength=p.L).astype(np.int64)
    state = SimState(
        config=Configuration(occupations=occ, total=p.N),
        params=p,
        kind=DynamicsKind(kind),
        seed=int(seed),
        rng=rng,
        zrp_rates=zrp_rates,
    )
    if debug is not None:
        state.debug = debug
    default_router.for_kind(state.kind).prepare(state)
    return state


def _require(state: SimState, kind: DynamicsKind):
    if state.kind != kind:
        raise ValueError(f"state of kind '{state.kind.value}' passed to the '{kind.value}' runner")


def run_cg(state: SimState, t_target: float) -> SimState:
    _require(state, DynamicsKind.CG)
    return default_router.run(state, t_target)


def run_ta(state: SimState, t_target: float) -> SimState:
    _require(state, DynamicsKind.TA_RING)
    return default_router.run(state, t_target)


def run_zrp(state: SimState, t_target: float) -> SimState:
    _require(state, DynamicsKind.ZRP_RING)
    return default_router.run(state, t_target)


def default_burn_in(kind: DynamicsKind, p: ModelParams, factor: float = DEFAULT_BURN_IN_FACTOR) -> float:
    """c L for CG, c L / d on the ring."""
    return default_router.burn_in(DynamicsKind(kind), p, factor)


def aggregation_time(kind: DynamicsKind, p: ModelParams) -> float:
    """Time for a cluster to gather a macroscopic mass: L / d on the ring, L on the complete graph."""
    return p.L if DynamicsKind(kind) == DynamicsKind.CG else p.L / p.d


def fragmentation_time(kind: DynamicsKind, p: ModelParams) -> float:
    """Time for a cluster to lose a finite mass fraction: d^-2 on the ring, 1/d on the complete graph."""
    return 1.0 / p.d if DynamicsKind(kind) == DynamicsKind.CG else p.d ** -2


def run_with_snapshots(state: SimState, t_target: float, interval: float) -> List[Configuration]:
    """Advance to t_target, recording the configuration every `interval` time units (and at t_target)."""
    if interval <= 0:
        raise ValueError("snapshot interval must be > 0")
    shots = []
    t = state.time
    while t + interval < t_target:
        t += interval
        default_router.run(state, t)
        shots.append(state.snapshot())
    default_router.run(state, t_target)
    shots.append(state.snapshot())
    return shots


def sample_stationary(p: ModelParams, kind: DynamicsKind, n_samples: int, seed: int,
                      spacing: Optional[float] = None, burn_in_factor: float = DEFAULT_BURN_IN_FACTOR,
                      zrp_rates: str = "inclusion",
                      progress_callback: Optional[Callable[[str], None]] = None) -> List[Configuration]:
    """
    n_samples configurations after one burn-in time, `spacing` apart (default one burn-in time).

    Each returned Configuration carries the stream seed and its process time.
    """
    if n_samples <= 0:
        return []
    burn = default_burn_in(kind, p, burn_in_factor)
    spacing = burn if spacing is None else spacing
    state = init_uniform(p, seed, kind, zrp_rates=zrp_rates)
    out = []
    for k in range(n_samples):
        default_router.run(state, burn + k * spacing)
        out.append(state.snapshot())
        if progress_callback:
            progress_callback(f"sample {k + 1}/{n_samples} at t={state.time:.6g}")
    logger.debug(f"{n_samples} samples kind={state.kind.value} L={p.L} N={p.N} d={p.d} seed={seed}")
    return out


ReplicaRow = Tuple[int, int, Configuration]


def _replica_worker(args) -> List[ReplicaRow]:
    p, kind, index, master_seed, n_samples, spacing, burn_in_factor, zrp_rates = args
    seed = derive_seed(master_seed, index)
    samples = sample_stationary(p, kind, n_samples, seed, spacing, burn_in_factor, zrp_rates)
    return [(index, k, c) for k, c in enumerate(samples)]


def run_replicas(p: ModelParams, kind: DynamicsKind, replicas: int, master_seed: int, n_samples: int = 1,
                 spacing: Optional[float] = None, burn_in_factor: float = DEFAULT_BURN_IN_FACTOR,
                 zrp_rates: str = "inclusion", jobs: int = 1,
                 progress_callback: Optional[Callable[[str], None]] = None) -> List[ReplicaRow]:
    """
    Independent replicas with seeds derive_seed(master_seed, r), merged by
    (replica, sample) index whatever order the workers finish in.
    """
    tasks = [(p, kind, r, master_seed, n_samples, spacing, burn_in_factor, zrp_rates) for r in range(replicas)]
    rows: List[ReplicaRow] = []
    if jobs > 1 and replicas > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for i, chunk in enumerate(pool.map(_replica_worker, tasks)):
                rows.extend(chunk)
                if progress_callback:
                    progress_callback(f"replica {i + 1}/{replicas}")
    else:
        for i, task in enumerate(tasks):
            rows.extend(_replica_worker(task))
            if progress_callback:
                progress_callback(f"replica {i + 1}/{replicas}")
    rows.sort(key=lambda r: (r[0], r[1]))
    return rows
