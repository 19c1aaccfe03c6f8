# ipcondense/dynamics/__init__.py
# Stochastic simulators for the inclusion process and its zero-range equivalent.

from .base_dynamics import BaseDynamics, Configuration, SimState, UniformStream
from .cg_dynamics import CGDynamics
from .oracle import canonical_probabilities, enumerate_configurations, stationarity_residual, transition_generator
from .rate_tree import tree_build, tree_select, tree_update
from .ring_dynamics import TADynamics, ZRPDynamics, site_rates, total_rate, zrp_rate
from .router import DynamicsRouter, default_router
from .sampling import (
    aggregation_time,
    default_burn_in,
    derive_seed,
    fragmentation_time,
    init_uniform,
    run_cg,
    run_replicas,
    run_ta,
    run_with_snapshots,
    run_zrp,
    sample_stationary,
)

__all__ = [
    "BaseDynamics",
    "Configuration",
    "SimState",
    "UniformStream",
    "CGDynamics",
    "TADynamics",
    "ZRPDynamics",
    "DynamicsRouter",
    "default_router",
    "tree_build",
    "tree_select",
    "tree_update",
    "site_rates",
    "total_rate",
    "zrp_rate",
    "enumerate_configurations",
    "canonical_probabilities",
    "transition_generator",
    "stationarity_residual",
    "aggregation_time",
    "default_burn_in",
    "derive_seed",
    "fragmentation_time",
    "init_uniform",
    "run_cg",
    "run_ta",
    "run_zrp",
    "run_replicas",
    "run_with_snapshots",
    "sample_stationary",
]
