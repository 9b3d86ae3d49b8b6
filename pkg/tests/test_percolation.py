import itertools

import numpy as np
import pytest

from conftest import DATA, bridge_leaf_pair, clique_edges, graph
from oracles import brute_component_count, read_graph6
from ownet import _kernels
from ownet.percolation import percolate, percolate_graph, percolation_slope
from ownet.types import OwnerType

BACKENDS = [_kernels.pure] + ([_kernels.compiled] if _kernels.compiled is not None else [])


def all_orders_agree(kernel, n, edges, targets):
    """Check every removal order of ``targets`` against from-scratch counts.

    The count after a prefix depends only on the removed set, so the oracle
    is evaluated once per subset.
    """
    g = graph(n, edges)
    keep = np.ones(n, dtype=np.uint8)
    keep[list(targets)] = 0
    cache = {}

    def naive(removed):
        if removed not in cache:
            cache[removed] = brute_component_count(n, edges, set(removed))
        return cache[removed]

    for order in itertools.permutations(targets):
        got = kernel.percolation_counts(g.indptr, g.indices, keep, np.array(order, dtype=np.int64))
        want = [naive(frozenset(order[:r])) for r in range(len(order) + 1)]
        if got.tolist() != want:
            return False
    return True


@pytest.mark.parametrize("kernel", BACKENDS, ids=lambda k: k.__name__.rsplit(".", 1)[-1])
def test_all_orders_small_graphs(kernel):
    for n, edges in read_graph6(DATA / "connected_le7.g6"):
        if n <= 6:
            assert all_orders_agree(kernel, n, edges, tuple(range(n)))


@pytest.mark.parametrize("kernel", BACKENDS, ids=lambda k: k.__name__.rsplit(".", 1)[-1])
def test_all_orders_typed_subsets(kernel):
    rng = np.random.default_rng(1)
    graphs = [g for g in read_graph6(DATA / "connected_le7.g6") if g[0] == 7]
    for i in rng.choice(len(graphs), 25, replace=False).tolist():
        n, edges = graphs[i]
        targets = tuple(np.flatnonzero(rng.random(n) < 0.6).tolist())
        assert all_orders_agree(kernel, n, edges, targets)


def test_backends_agree_on_larger_graph():
    if _kernels.compiled is None:
        pytest.skip("compiled kernels not built")
    rng = np.random.default_rng(2)
    n = 50
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.06]
    g = graph(n, edges)
    keep = (rng.random(n) < 0.3).astype(np.uint8)
    for _ in range(20):
        order = rng.permutation(np.flatnonzero(keep == 0))
        a = _kernels.pure.percolation_counts(g.indptr, g.indices, keep, order)
        b = _kernels.compiled.percolation_counts(g.indptr, g.indices, keep, order)
        assert np.array_equal(a, b)
        want = [brute_component_count(n, edges, set(order[:r].tolist())) for r in range(len(order) + 1)]
        assert a.tolist() == want


def test_star_center_removal():
    leaves = 6
    p = graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)], [12] + [1] * leaves)
    run = percolate(p, OwnerType.Banks, realizations=3)
    assert run.curves.tolist() == [[1, leaves]] * 3


def test_k4_single_type():
    run = percolate(graph(4, clique_edges(range(4))), OwnerType.Families, realizations=5)
    assert run.n_target == 4
    assert np.all(run.curves == [1, 1, 1, 1, 0])
    assert run.mean.tolist() == [1, 1, 1, 1, 0]
    assert np.all(run.std == 0)


def test_two_k4_chain_expectation():
    edges = clique_edges(range(4)) + clique_edges(range(6, 10)) + [(3, 4), (4, 5), (5, 6)]
    p = graph(10, edges, [1] * 4 + [12, 12] + [1] * 4)
    run = percolate(p, OwnerType.Banks, realizations=100, seed=3)
    # removing 4 first splits into {K4} and {5 + K4}; removing 5 first likewise
    assert np.all(run.curves[:, 1] == 2)
    assert run.mean[1] == 2.0 and run.mean[2] == 2.0


def test_chain_with_pendant_bridge_mean_one_and_a_half():
    # bridge node 4 cuts the graph; bridge node 8 is a pendant that does not
    edges = clique_edges(range(4)) + clique_edges(range(5, 9)) + [(3, 4), (4, 5), (8, 9), (9, 5)]
    p = graph(10, edges, [1] * 4 + [12] + [1] * 4 + [12])
    run = percolate(p, OwnerType.Banks, realizations=100, seed=0)
    exact = {(4, 9): [1, 2, 2], (9, 4): [1, 1, 2]}
    for order, curve in zip(run.orders.tolist(), run.curves.tolist()):
        assert curve == exact[tuple(order)]
    frac = np.mean(run.orders[:, 0] == 4)
    assert run.mean[1] == pytest.approx(1 + frac)
    assert 0.35 < frac < 0.65


def test_curve_starts_at_one_on_lcc():
    p = graph(7, clique_edges(range(4)) + [(4, 5)], [1, 1, 12, 12, 12, 12, 12])
    run = percolate(p, OwnerType.Banks, realizations=4)
    assert run.n_target == 2
    assert np.all(run.curves[:, 0] == 1)
    assert run.curves.shape == (4, 3)


def test_absent_type_gives_empty_run():
    run = percolate(graph(3, [(0, 1), (1, 2)]), OwnerType.State, realizations=10)
    assert run.empty and run.curves.size == 0
    with pytest.raises(ValueError):
        percolation_slope(run)


def test_monotone_bounds():
    rng = np.random.default_rng(4)
    n = 40
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.08]
    types = rng.integers(1, 3, n)
    g = graph(n, edges, types)
    run = percolate_graph(g, 1, realizations=30, seed=1)
    deg = g.degrees
    for order, curve in zip(run.orders, run.curves):
        for r, v in enumerate(order.tolist()):
            assert curve[r + 1] >= curve[r] - 1
            assert curve[r + 1] <= curve[r] - 1 + deg[v]


def test_deterministic_and_job_independent():
    a, _ = bridge_leaf_pair()
    r1 = percolate(a, OwnerType.Banks, realizations=20, seed=9, jobs=1)
    r2 = percolate(a, OwnerType.Banks, realizations=20, seed=9, jobs=2)
    assert np.array_equal(r1.orders, r2.orders)
    assert np.array_equal(r1.mean, r2.mean)
    r3 = percolate(a, OwnerType.Banks, realizations=20, seed=10)
    assert not np.array_equal(r1.orders, r3.orders)


def test_realizations_validated():
    with pytest.raises(ValueError):
        percolate(graph(2, [(0, 1)]), 1, realizations=0)


def test_slopes_flat_and_unit():
    bridge, leaf = bridge_leaf_pair()
    sb = percolation_slope(percolate(bridge, OwnerType.Banks, realizations=10))
    sl = percolation_slope(percolate(leaf, OwnerType.Banks, realizations=10))
    assert sb == pytest.approx(1.0)
    assert sl == pytest.approx(0.0, abs=1e-12)


def test_slope_range_checks():
    run = percolate(graph(4, clique_edges(range(4))), OwnerType.Families, realizations=2)
    assert percolation_slope(run, (0, 3)) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        percolation_slope(run, (0, 5))
    with pytest.raises(ValueError):
        percolation_slope(run, (2, 2))
