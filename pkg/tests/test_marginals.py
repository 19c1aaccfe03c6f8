import itertools

import numpy as np
import pytest

from ipcondense.errors import DomainError
from ipcondense.marginals import (
    canonical_marginal,
    canonical_marginal_pmf,
    canonical_moment,
    exact_phase_decomposition,
    size_biased_joint_pmf,
    size_biased_marginal,
    size_biased_marginal_pmf,
)
from ipcondense.partition import build_partition_table
from ipcondense.schemas import ModelParams
from ipcondense.stats import exponential_cdf

from .conftest import enumerated_law


def test_two_sites_two_particles():
    p = ModelParams(L=2, N=2, d=1.0)
    table = build_partition_table(p)
    np.testing.assert_allclose(canonical_marginal(p, table), [1 / 3, 1 / 3, 1 / 3], atol=1e-12)
    assert size_biased_marginal_pmf(0, p, table) == 0.0
    assert size_biased_marginal_pmf(1, p, table) == pytest.approx(1 / 3)
    assert size_biased_marginal_pmf(2, p, table) == pytest.approx(2 / 3)
    assert size_biased_joint_pmf([1, 1], p, table) == pytest.approx(1 / 3)


@pytest.mark.parametrize("L,N,d", [(5, 12, 0.3), (20, 40, 1.0), (64, 256, 0.1), (7, 3, 2.0)])
def test_canonical_marginal_normalized_with_mean_density(L, N, d):
    p = ModelParams(L=L, N=N, d=d)
    table = build_partition_table(p)
    pmf = canonical_marginal(p, table)
    assert pmf.sum() == pytest.approx(1.0, abs=1e-10)
    assert np.dot(np.arange(N + 1), pmf) == pytest.approx(N / L, abs=1e-9)
    assert canonical_moment(p, 1.0, table) == pytest.approx(N / L, abs=1e-9)


def test_closed_form_and_table_agree():
    p = ModelParams(L=10, N=25, d=0.4)
    np.testing.assert_allclose(canonical_marginal(p), canonical_marginal(p, build_partition_table(p)), rtol=1e-9)


def test_canonical_marginal_matches_enumeration():
    p = ModelParams(L=3, N=4, d=0.3)
    states, probs = enumerated_law(3, 4, 0.3)
    expected = [probs[states[:, 0] == n].sum() for n in range(5)]
    np.testing.assert_allclose(canonical_marginal(p), expected, atol=1e-12)


def test_pmf_edge_cases():
    p = ModelParams(L=4, N=6, d=0.5)
    assert canonical_marginal_pmf(7, p) == 0.0
    assert canonical_marginal_pmf(-1, p) == 0.0
    single = ModelParams(L=1, N=6, d=0.5)
    assert canonical_marginal_pmf(6, single) == 1.0
    np.testing.assert_array_equal(canonical_marginal(single), [0, 0, 0, 0, 0, 0, 1])
    assert size_biased_marginal_pmf(6, single) == pytest.approx(1.0)


def test_size_biased_marginal_is_reweighted_canonical():
    p = ModelParams(L=9, N=17, d=0.6)
    table = build_partition_table(p)
    canon = canonical_marginal(p, table)
    sb = size_biased_marginal(p, table)
    np.testing.assert_allclose(sb, p.L / p.N * np.arange(p.N + 1) * canon, rtol=1e-14)
    assert sb[0] == 0.0
    assert sb.sum() == pytest.approx(1.0, abs=1e-10)
    for n in (1, 5, 17):
        assert size_biased_joint_pmf([n], p, table) == pytest.approx(sb[n], rel=1e-10)


def test_size_biased_needs_particles():
    p = ModelParams(L=3, N=0, d=1.0)
    with pytest.raises(DomainError):
        size_biased_marginal(p)
    with pytest.raises(DomainError):
        size_biased_marginal_pmf(1, p)


def test_joint_sums_to_one_over_all_tuples():
    p = ModelParams(L=3, N=3, d=0.5)
    table = build_partition_table(p)
    total = sum(size_biased_joint_pmf(ns, p, table) for ns in itertools.product(range(4), repeat=3))
    assert total == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_joint_marginalizes_to_shorter_joint(k):
    p = ModelParams(L=8, N=12, d=0.7)
    table = build_partition_table(p)
    for prefix in itertools.product(range(p.N + 1), repeat=k - 1):
        if sum(prefix) > p.N:
            continue
        shorter = size_biased_joint_pmf(prefix, p, table)
        summed = sum(size_biased_joint_pmf(list(prefix) + [n], p, table) for n in range(p.N + 1))
        assert summed == pytest.approx(shorter, abs=1e-10)


def test_joint_rejects_too_many_sites():
    with pytest.raises(DomainError):
        size_biased_joint_pmf([1, 1, 1], ModelParams(L=2, N=3, d=1.0))


def test_exact_phase_decomposition():
    p = ModelParams(L=6, N=10, d=0.4)
    bulk, condensed, volume = exact_phase_decomposition(p, p.N)
    assert (bulk, condensed, volume) == pytest.approx((1.0, 0.0, 0.0), abs=1e-12)
    bulk, condensed, volume = exact_phase_decomposition(p, 2)
    assert bulk + condensed == pytest.approx(1.0)
    assert 0.0 < volume < 1.0


def test_canonical_moment_rejects_nonpositive_order():
    with pytest.raises(DomainError):
        canonical_moment(ModelParams(L=3, N=3, d=1.0), 0.0)


def scaled_first_ks_to_exponential(p):
    """KS distance between d η̃_1 under the exact law and Exp(ρ)."""
    pmf = size_biased_marginal(p)
    ref = exponential_cdf(p.rho)(p.d * np.arange(p.N + 1))
    upper = np.cumsum(pmf)
    return float(max(np.abs(upper - ref).max(), np.abs(upper - pmf - ref).max()))


def test_scaled_size_biased_law_approaches_exponential():
    L, d = 1024, 1 / 32
    ks = {rho: scaled_first_ks_to_exponential(ModelParams(L=L, N=int(rho * L), d=d)) for rho in (0.5, 1.0, 2.0)}
    assert ks[1.0] <= 0.05
    assert ks[2.0] <= 0.05
    # the finite-size law itself misses 0.05 at low density
    assert ks[0.5] > 0.05
    assert ks[2.0] < ks[1.0] < ks[0.5]
