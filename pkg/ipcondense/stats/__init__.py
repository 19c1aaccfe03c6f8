# ipcondense/stats/__init__.py
# Size-biased sampling, GEM/PD references, empirical distributions and condensation diagnostics.

from .diagnostics import empirical_moment, log_slope, max_fraction, occupied_sites, phase_decomposition
from .empirical import EmpiricalDistribution, ks_distance, summarize
from .gem import beta_one_alpha, expected_residual, k_for_residual, sample_gem, sample_gem_batch, sample_pd
from .reference import exponential_cdf, scaled_lattice_cdf, size_biased_gc_pmf, size_biased_gc_table
from .sizebias import (
    SizeBiasedSample,
    UnitPartition,
    order_statistics,
    r_k,
    r_k_profile,
    size_biased_permutation,
)

__all__ = [
    "SizeBiasedSample",
    "UnitPartition",
    "size_biased_permutation",
    "order_statistics",
    "r_k",
    "r_k_profile",
    "beta_one_alpha",
    "expected_residual",
    "k_for_residual",
    "sample_gem",
    "sample_gem_batch",
    "sample_pd",
    "size_biased_gc_pmf",
    "size_biased_gc_table",
    "scaled_lattice_cdf",
    "exponential_cdf",
    "EmpiricalDistribution",
    "ks_distance",
    "summarize",
    "occupied_sites",
    "max_fraction",
    "phase_decomposition",
    "empirical_moment",
    "log_slope",
]
