import math

import numpy as np
import pytest
from scipy import stats

from ipcondense.dynamics import (
    Configuration,
    SimState,
    UniformStream,
    aggregation_time,
    default_burn_in,
    default_router,
    derive_seed,
    fragmentation_time,
    init_uniform,
    run_cg,
    run_replicas,
    run_ta,
    run_with_snapshots,
    run_zrp,
    sample_stationary,
    site_rates,
    stationarity_residual,
    total_rate,
    zrp_rate,
)
from ipcondense.dynamics.cg_dynamics import CGDynamics
from ipcondense.dynamics.rate_tree import tree_build, tree_select, tree_update
from ipcondense.schemas import DynamicsKind, ModelParams

from .conftest import enumerated_law, total_variation

KINDS = [DynamicsKind.CG, DynamicsKind.TA_RING, DynamicsKind.ZRP_RING]


# exact stationarity on tiny systems

@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("L,N", [(3, 3), (3, 4), (4, 3)])
@pytest.mark.parametrize("d", [0.3, 1.0])
def test_canonical_measure_is_stationary(kind, L, N, d):
    assert stationarity_residual(ModelParams(L=L, N=N, d=d), kind) <= 1e-10


def test_ratio_zrp_variant_has_other_stationary_law():
    assert stationarity_residual(ModelParams(L=3, N=3, d=0.3), DynamicsKind.ZRP_RING, "ratio") > 1e-6


@pytest.mark.slow
@pytest.mark.parametrize("kind", KINDS)
def test_long_run_histogram_matches_enumeration(kind):
    p = ModelParams(L=3, N=3, d=0.7)
    states, probs = enumerated_law(3, 3, 0.7)
    state = init_uniform(p, seed=11, kind=kind)
    default_router.run(state, 20.0)
    shots = run_with_snapshots(state, state.time + 100_000.0, 1.0)
    assert total_variation(states, probs, [s.occupations for s in shots]) <= 0.02


@pytest.mark.slow
@pytest.mark.parametrize("kind", [DynamicsKind.TA_RING, DynamicsKind.ZRP_RING])
def test_ring_occupations_are_spatially_homogeneous(kind):
    p = ModelParams(L=8, N=8, d=1.0)
    state = init_uniform(p, seed=21, kind=kind)
    default_router.run(state, 50.0)
    shots = run_with_snapshots(state, state.time + 4000 * 20.0, 20.0)
    # one site per snapshot, cycling through the ring; occupations binned 0, 1, 2, 3+
    table = np.zeros((p.L, 4), dtype=np.int64)
    for k, shot in enumerate(shots):
        x = k % p.L
        table[x, min(int(shot.occupations[x]), 3)] += 1
    assert table.sum() == 4000
    _, pvalue, _, _ = stats.chi2_contingency(table)
    assert pvalue > 0.01


def test_pure_relocation_gives_multinomial_law():
    # d huge: every move is a relocation to a uniform site
    p = ModelParams(L=4, N=2, d=1e9)
    state = init_uniform(p, seed=3)
    # about 8 attempted steps per interval at this step rate
    interval = 1e-9
    shots = run_with_snapshots(state, 20_000 * interval, interval)
    doubled = np.mean([s.occupations.max() == 2 for s in shots])
    assert abs(doubled - 0.25) <= 0.02


# rates

def test_zrp_rates():
    assert zrp_rate(1, 0.2, 0) == pytest.approx(5.0)
    assert zrp_rate(10, 1e-6, 0) == pytest.approx(10 / 9, abs=1e-5)
    assert zrp_rate(0, 0.2, 0) == 0.0
    assert zrp_rate(1, 0.2, 1) == pytest.approx(5.0)
    assert zrp_rate(4, 0.2, 1) == pytest.approx(4 / 3)
    assert zrp_rate(4, 0.2, 2) == pytest.approx(1.25)


def _state(occupations, d, kind, zrp_rates="inclusion"):
    conf = Configuration.from_occupations(occupations)
    p = ModelParams(L=conf.L, N=conf.total, d=d)
    state = SimState(config=conf, params=p, kind=kind, seed=0, rng=np.random.default_rng(0), zrp_rates=zrp_rates)
    default_router.for_kind(kind).prepare(state)
    return state


def test_single_occupied_site_exit_rate():
    state = _state([2, 0, 0], 0.5, DynamicsKind.TA_RING)
    np.testing.assert_allclose(site_rates(state), [1.0, 0.0, 0.0])
    state = _state([2, 1, 0], 0.5, DynamicsKind.TA_RING)
    np.testing.assert_allclose(site_rates(state), [2 * 1.5, 0.5, 0.0])


def test_tree_total_tracks_recomputed_rates():
    p = ModelParams(L=64, N=128, d=0.3)
    for kind in (DynamicsKind.TA_RING, DynamicsKind.ZRP_RING):
        state = init_uniform(p, seed=5, kind=kind)
        while state.events < 1_000_000:
            default_router.run(state, state.time + 50.0)
        assert state.tree[1] == pytest.approx(total_rate(state), rel=1e-8)
        assert int(state.occupations.sum()) == p.N


# rate tree

def leaves(tree, n):
    size = tree.size // 2
    return tree[size:size + n]


def test_rate_tree_selection():
    tree = tree_build(np.array([0.0, 1.0, 0.0, 2.0, 0.5]))
    assert tree[1] == pytest.approx(3.5)
    assert tree_select(tree, 0.5) == 1
    assert tree_select(tree, 1.0) == 3
    assert tree_select(tree, 3.2) == 4
    tree_update(tree, 1, 0.0)
    assert tree[1] == pytest.approx(2.5)
    assert tree_select(tree, 0.0) == 3
    np.testing.assert_allclose(leaves(tree, 5), [0.0, 0.0, 0.0, 2.0, 0.5])


def test_rate_tree_never_selects_empty_right_branch():
    tree = tree_build(np.array([1.0, 2.0, 0.0, 0.0]))
    assert tree_select(tree, 3.0) == 1
    assert leaves(tree, 4)[1] == 2.0


def test_selection_frequencies(rng):
    rates = np.array([0.5, 0.0, 3.0, 1.5])
    tree = tree_build(rates)
    picks = [tree_select(tree, u) for u in rng.random(40_000) * tree[1]]
    freq = np.bincount(picks, minlength=4) / len(picks)
    np.testing.assert_allclose(freq, rates / rates.sum(), atol=0.01)



# streams and determinism

def test_uniform_stream_independent_of_call_split():
    a = UniformStream(np.random.default_rng(5), chunk=4)
    b = UniformStream(np.random.default_rng(5), chunk=4)
    split = np.concatenate([a.take(3), a.take(6), a.take(1)])
    np.testing.assert_array_equal(split, b.take(10))


def test_cg_segmented_run_matches_single_run():
    p = ModelParams(L=32, N=64, d=0.1)
    one = init_uniform(p, seed=9)
    two = init_uniform(p, seed=9)
    run_cg(one, 1.0)
    run_cg(one, 2.0)
    run_cg(two, 2.0)
    np.testing.assert_array_equal(one.occupations, two.occupations)
    assert one.steps == two.steps == math.ceil(2.0 * CGDynamics.step_rate(p))
    assert one.time >= 2.0


@pytest.mark.parametrize("kind", KINDS)
def test_same_seed_same_trajectory(kind):
    p = ModelParams(L=16, N=40, d=0.4)
    a = sample_stationary(p, kind, 3, seed=17, burn_in_factor=0.5)
    b = sample_stationary(p, kind, 3, seed=17, burn_in_factor=0.5)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x.occupations, y.occupations)
        assert x.time == y.time and x.seed == y.seed == 17


def test_derive_seed():
    assert derive_seed(1, 0) == derive_seed(1, 0)
    assert len({derive_seed(1, r) for r in range(100)}) == 100
    assert derive_seed(1, 0) != derive_seed(2, 0)


# initial state and run contracts

def test_init_uniform_edge_cases():
    assert init_uniform(ModelParams(L=5, N=0, d=1.0), seed=1).occupations.tolist() == [0] * 5
    assert init_uniform(ModelParams(L=1, N=7, d=1.0), seed=1).occupations.tolist() == [7]


def test_init_uniform_is_uniform():
    state = init_uniform(ModelParams(L=100, N=100_000, d=1.0), seed=2024)
    assert stats.chisquare(state.occupations).pvalue > 0.01


@pytest.mark.parametrize("kind", KINDS)
def test_mass_conservation(kind):
    p = ModelParams(L=20, N=50, d=0.2)
    state = init_uniform(p, seed=4, kind=kind, debug=True)
    default_router.run(state, 200.0)
    assert int(state.occupations.sum()) == p.N
    assert (state.occupations >= 0).all()
    state.check_mass()


def test_runner_checks_kind():
    state = init_uniform(ModelParams(L=4, N=4, d=1.0), seed=0)
    with pytest.raises(ValueError):
        run_ta(state, 1.0)
    with pytest.raises(ValueError):
        run_zrp(state, 1.0)


def test_ring_run_stops_exactly_at_target():
    state = init_uniform(ModelParams(L=8, N=8, d=0.5), seed=1, kind=DynamicsKind.TA_RING)
    run_ta(state, 3.25)
    assert state.time == 3.25
    assert state.events > 0


def test_snapshots_at_fixed_interval():
    state = init_uniform(ModelParams(L=8, N=8, d=0.5), seed=1, kind=DynamicsKind.ZRP_RING)
    shots = run_with_snapshots(state, 2.0, 0.5)
    assert [s.time for s in shots] == [0.5, 1.0, 1.5, 2.0]
    assert all(int(s.occupations.sum()) == 8 for s in shots)


def test_burn_in_and_time_scales():
    p = ModelParams(L=1024, N=1024, d=2.0**-10)
    assert default_burn_in(DynamicsKind.TA_RING, p, 10) == pytest.approx(10 * 2**20)
    assert default_burn_in(DynamicsKind.ZRP_RING, p, 10) == pytest.approx(10 * 2**20)
    assert default_burn_in(DynamicsKind.CG, p, 10) == pytest.approx(10240)
    assert default_burn_in(DynamicsKind.CG, p, 0) == 0.0
    assert aggregation_time(DynamicsKind.CG, p) == 1024
    assert aggregation_time(DynamicsKind.TA_RING, p) == pytest.approx(2**20)
    assert fragmentation_time(DynamicsKind.TA_RING, p) == pytest.approx(2**20)
    assert fragmentation_time(DynamicsKind.CG, p) == pytest.approx(1024)


def test_no_samples():
    assert sample_stationary(ModelParams(L=4, N=4, d=1.0), DynamicsKind.CG, 0, seed=1) == []


@pytest.mark.slow
def test_retained_samples_are_decorrelated():
    p = ModelParams.from_dl(L=256, N=256, dl=1.0)
    samples = sample_stationary(p, DynamicsKind.CG, 800, seed=77, burn_in_factor=0.03)
    maxima = np.array([s.occupations.max() for s in samples], dtype=float)
    x = maxima - maxima.mean()
    lag1 = float(np.dot(x[:-1], x[1:]) / np.dot(x, x))
    assert lag1 <= 0.1


@pytest.mark.slow
def test_replicas_merge_deterministically():
    p = ModelParams(L=16, N=32, d=0.25)
    serial = run_replicas(p, DynamicsKind.CG, 4, master_seed=3, n_samples=2, burn_in_factor=0.2)
    pooled = run_replicas(p, DynamicsKind.CG, 4, master_seed=3, n_samples=2, burn_in_factor=0.2, jobs=2)
    assert [(r, s) for r, s, _ in serial] == [(r, s) for r in range(4) for s in range(2)]
    for (_, _, a), (_, _, b) in zip(serial, pooled):
        np.testing.assert_array_equal(a.occupations, b.occupations)
        assert a.seed == b.seed
