import math

import numpy as np
import pytest

from ipcondense.dynamics import run_replicas, sample_stationary
from ipcondense.errors import DomainError
from ipcondense.schemas import DynamicsKind, ModelParams
from ipcondense.stats import empirical_moment, log_slope, max_fraction, occupied_sites, phase_decomposition


def test_single_cluster():
    conf = [0, 12, 0, 0]
    assert occupied_sites(conf) == 1
    assert max_fraction(conf) == 1.0
    assert phase_decomposition(conf, 0) == pytest.approx((0.0, 1.0, 0.25))
    assert phase_decomposition(conf, 12) == pytest.approx((1.0, 0.0, 0.0))


def test_singletons():
    conf = [1, 1, 1, 0, 1]
    assert occupied_sites(conf) == 4
    assert max_fraction(conf) == 0.25


def test_empirical_moment():
    configs = [[1, 2, 3], [0, 6, 0]]
    assert empirical_moment(configs, 1.0) == pytest.approx(2.0)
    assert empirical_moment(configs, 2.0) == pytest.approx((1 + 4 + 9 + 36) / 6)
    with pytest.raises(DomainError):
        empirical_moment([], 1.0)


def test_max_fraction_needs_particles():
    with pytest.raises(DomainError):
        max_fraction([0, 0])


def test_log_slope_recovers_coefficient():
    ns = np.array([2**k for k in range(4, 12)], dtype=float)
    slope, stderr = log_slope(ns, 0.7 * np.log(ns) + 3.0)
    assert slope == pytest.approx(0.7)
    assert stderr == pytest.approx(0.0, abs=1e-9)


@pytest.mark.slow
def test_complete_condensation_in_simulation():
    L = 256
    p = ModelParams(L=L, N=512, d=L**-2.0)
    samples = sample_stationary(p, DynamicsKind.CG, 20, seed=8, burn_in_factor=0.05)
    assert np.mean([max_fraction(s) for s in samples]) >= 0.95
    assert math.isclose(sum(phase_decomposition(samples[-1], math.sqrt(p.N))[:2]), 1.0)


def stationary_configs(p, replicas, n_samples=1, spacing=None, burn_in_factor=None, seed=0):
    """Complete-graph configurations, burnt in for about 10 time units unless told otherwise."""
    factor = 10.0 / p.L if burn_in_factor is None else burn_in_factor
    rows = run_replicas(p, DynamicsKind.CG, replicas, master_seed=seed, n_samples=n_samples, spacing=spacing,
                        burn_in_factor=factor, jobs=4)
    return [conf for _, _, conf in rows]


@pytest.mark.slow
def test_occupied_sites_grow_like_log_n_at_dl_one():
    Ls = [2**k for k in range(8, 13)]
    means = []
    for L in Ls:
        configs = stationary_configs(ModelParams.from_dl(L=L, N=L, dl=1.0), 8, n_samples=4, spacing=3.0, seed=L)
        means.append(np.mean([occupied_sites(c) for c in configs]))
    slope, _ = log_slope(Ls, means)
    assert 0.4 <= slope <= 1.6


@pytest.mark.slow
def test_second_moment_grows_with_l_at_fixed_dl():
    moments = [empirical_moment(stationary_configs(ModelParams.from_dl(L=L, N=L, dl=1.0), 20, seed=L), 2.0)
               for L in (128, 256, 512)]
    assert moments[0] < moments[1] < moments[2]


@pytest.mark.slow
def test_square_root_moment_settles_at_fixed_d():
    moments = [empirical_moment(stationary_configs(ModelParams(L=L, N=L, d=1.0), 20, burn_in_factor=0.05, seed=L),
                                0.5)
               for L in (128, 256, 512)]
    assert max(moments) / min(moments) <= 1.1


@pytest.mark.slow
def test_mass_condenses_above_square_root_threshold():
    p = ModelParams.from_dl(L=512, N=512, dl=1.0)
    configs = stationary_configs(p, 20, seed=12)
    condensed = [phase_decomposition(c, math.sqrt(p.N))[1] for c in configs]
    assert np.mean(condensed) >= 0.9
