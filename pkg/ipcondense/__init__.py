# ipcondense/__init__.py
# Condensation in the inclusion process: exact partition functions, simulators, statistics and rate functions.

from .errors import BudgetExceededError, ConfigError, DomainError, UnsupportedRegimeError
from .schemas import DynamicsKind, ExperimentConfig, ModelParams, RateQuery
from .weights import (
    GrandCanonical,
    density_R,
    fugacity_Phi,
    grand_canonical_pmf,
    log_weight,
    log_Z_asymptotic,
    log_Z_closed_form,
    log_Z_ratio,
    relative_entropy_rate,
)
from .partition import PartitionTable, build_partition_table, truncated_log_Z_row
from .marginals import (
    canonical_marginal,
    canonical_marginal_pmf,
    canonical_moment,
    exact_phase_decomposition,
    size_biased_joint_pmf,
    size_biased_marginal,
    size_biased_marginal_pmf,
)
from .ldp import (
    condensed_joint_limit,
    empirical_rate,
    exact_max_distribution,
    max_distribution_bounds,
    prefactor_C,
    rate_complete,
    rate_curve,
    rate_fluid,
    rate_intermediate,
)

__version__ = "0.3.0"

__all__ = [
    "BudgetExceededError",
    "ConfigError",
    "DomainError",
    "UnsupportedRegimeError",
    "DynamicsKind",
    "ExperimentConfig",
    "ModelParams",
    "RateQuery",
    "GrandCanonical",
    "density_R",
    "fugacity_Phi",
    "grand_canonical_pmf",
    "log_weight",
    "log_Z_asymptotic",
    "log_Z_closed_form",
    "log_Z_ratio",
    "relative_entropy_rate",
    "PartitionTable",
    "build_partition_table",
    "truncated_log_Z_row",
    "canonical_marginal",
    "canonical_marginal_pmf",
    "canonical_moment",
    "exact_phase_decomposition",
    "size_biased_joint_pmf",
    "size_biased_marginal",
    "size_biased_marginal_pmf",
    "condensed_joint_limit",
    "empirical_rate",
    "exact_max_distribution",
    "max_distribution_bounds",
    "prefactor_C",
    "rate_complete",
    "rate_curve",
    "rate_fluid",
    "rate_intermediate",
]
