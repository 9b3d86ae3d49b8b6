import math

import numpy as np
import pytest

from conftest import bipartite
from ownet.graph import BipartiteNetwork, project
from ownet.ingest import DegreeLaw, SynthSpec, generate
from ownet.metrics import centrality
from ownet.nullmodel import (
    NULL_BOX_HEADER,
    SwapBudgetError,
    SwapPlan,
    box_stats,
    derive_seed,
    ensemble,
    ensemble_map,
    null_summary,
    rewire,
    summarize_values,
)
from ownet.types import OwnerType


def medium_network(seed=0, n_s=600, n_c=300):
    spec = SynthSpec(n_s, n_c, DegreeLaw.power(2.5, 1, 30), DegreeLaw.power(2.3, 1, 40), seed=seed)
    return generate(spec)


def test_only_legal_swap():
    b = bipartite([("s1", "c1"), ("s2", "c2")])
    r = rewire(b, SwapPlan(1, seed=0))
    assert r.edge_set() == {("s1", "c2"), ("s2", "c1")}
    assert (r.shareholder_degrees() == 1).all() and (r.company_degrees() == 1).all()


def test_saturated_k22_rejects_everything():
    b = bipartite([("s1", "c1"), ("s1", "c2"), ("s2", "c1"), ("s2", "c2")])
    with pytest.raises(SwapBudgetError) as err:
        rewire(b, SwapPlan(1, seed=0, max_attempts_per_swap=50))
    assert err.value.done == 0 and err.value.requested == 1
    assert err.value.network == b
    assert "0/1" in str(err.value)


def test_rewire_needs_two_edges():
    with pytest.raises(ValueError):
        rewire(bipartite([("s", "c")]), SwapPlan(1))


def test_zero_swaps_is_identity():
    b = medium_network()
    assert rewire(b, SwapPlan(0)) is b


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_degrees_preserved(seed):
    b = medium_network(seed)
    assert 500 < b.n_edges < 3000
    r = rewire(b, SwapPlan(10 * b.n_edges, seed=seed))
    assert np.array_equal(r.shareholder_degrees(), b.shareholder_degrees())
    assert np.array_equal(r.company_degrees(), b.company_degrees())
    assert np.array_equal(r.types, b.types)
    assert r.n_edges == b.n_edges
    # the edge set has actually moved
    assert len(r.edge_set() & b.edge_set()) < 0.5 * b.n_edges


def test_rewire_deterministic_per_seed():
    b = medium_network()
    assert rewire(b, SwapPlan(1000, seed=5)) == rewire(b, SwapPlan(1000, seed=5))
    assert not (rewire(b, SwapPlan(1000, seed=5)) == rewire(b, SwapPlan(1000, seed=6)))


def test_swap_plan_validation():
    with pytest.raises(ValueError):
        SwapPlan(-1)
    with pytest.raises(ValueError):
        SwapPlan(1, max_attempts_per_swap=0)


def test_derived_seeds_are_distinct_and_stable():
    seeds = [derive_seed(7, i) for i in range(1000)]
    assert len(set(seeds)) == 1000
    assert seeds[3] == derive_seed(7, 3)
    assert derive_seed(8, 3) != seeds[3]


def test_ensemble_single_unswapped_realization():
    b = medium_network()
    e = ensemble(b, 1, swaps_per_edge=0, seed=3)
    assert e.size == 1
    assert e.realizations[0].edge_set() == project(b).edge_set()


def test_ensemble_preserves_degrees_and_is_job_independent():
    b = medium_network(4)
    e1 = ensemble(b, 6, seed=2, jobs=1)
    e2 = ensemble(b, 6, seed=2, jobs=2)
    for r1, r2 in zip(e1.networks, e2.networks):
        assert r1 == r2
        assert np.array_equal(r1.shareholder_degrees(), b.shareholder_degrees())
        assert np.array_equal(r1.company_degrees(), b.company_degrees())
    assert e1.seeds == tuple(derive_seed(2, i) for i in range(6))


def test_ensemble_validation():
    b = medium_network()
    with pytest.raises(ValueError):
        ensemble(b, 0)
    with pytest.raises(ValueError):
        ensemble(b, 2, swaps_per_edge=-1)


def _lcc_size(network, p):
    from ownet.graph import components
    return components(p).n_lcc


def test_ensemble_mean_standard_error_scaling():
    # block means over 25 vs 100 realisations: spread ratio close to sqrt(4) = 2
    b = medium_network(1)
    values = np.array(ensemble_map(b, 2000, _lcc_size, swaps_per_edge=2, seed=9), dtype=float)
    sd25 = values.reshape(-1, 25).mean(axis=1).std(ddof=1)
    sd100 = values.reshape(-1, 100).mean(axis=1).std(ddof=1)
    assert 1.3 < sd25 / sd100 < 3.0


# ------------------------------------------------------------ boxes

def test_box_stats_quartiles():
    box = box_stats([1, 2, 3, 4, 5, 6, 7, 8, 100])
    assert (box.q1, box.median, box.q3) == (3.0, 5.0, 7.0)
    assert box.lo_whisker == 1.0
    assert box.hi_whisker == 8.0     # 100 lies beyond q3 + 1.5 IQR
    assert box.contains(5) and not box.contains(100)


def test_constant_metric_zero_width():
    rows = summarize_values([{3: 2.5}] * 10, {3: 2.5}, "const")
    (row,) = rows
    b = row.box
    assert b.q1 == b.q3 == b.lo_whisker == b.hi_whisker == 2.5
    assert row.as_row() == (3, "const", 2.5, 2.5, 2.5, 2.5, 2.5, 2.5)
    assert len(NULL_BOX_HEADER) == len(row.as_row())


def _mean_degree(p):
    out = {}
    for t in np.unique(p.types).tolist():
        out[t] = float(p.degrees[p.types == t].mean())
    return out


def _bipartite_degree_by_type(b: BipartiteNetwork):
    d = b.shareholder_degrees()
    return {int(t): float(d[b.types == t].mean()) for t in np.unique(b.types).tolist()}


def test_preserved_degree_lies_inside_every_box():
    b = medium_network(2)
    e = ensemble(b, 20, seed=4)
    values = [_bipartite_degree_by_type(r) for r in e.networks]
    rows = summarize_values(values, _bipartite_degree_by_type(b), "degree")
    assert rows
    for row in rows:
        assert row.box.contains(row.real_value)
        assert row.box.lo_whisker == row.box.hi_whisker == row.real_value


def bridge_fixture(seed=0):
    """Two random clusters of small companies joined by one Banks shareholder."""
    rng = np.random.default_rng(seed)
    edges, types = [], {}
    for side in "AB":
        for c in range(30):
            for s in rng.choice(20, 3, replace=False):
                edges.append((f"{side}{s}", f"{side}c{c}"))
                types[f"{side}{s}"] = OwnerType.Families
    edges += [("bridge", "Ac0"), ("bridge", "Bc0")]
    types["bridge"] = OwnerType.Banks
    return BipartiteNetwork.from_edges(edges, types)


def _betweenness_means(p):
    return centrality(p).type_means("betweenness")


def test_bridge_betweenness_exceeds_null_whisker():
    b = bridge_fixture()
    real = project(b)
    assert centrality(real).betweenness[real.node_ids.index("bridge")] == 400.0
    rows = null_summary(ensemble(b, 40, seed=1), _betweenness_means, real, "betweenness")
    banks = next(r for r in rows if r.type_id == OwnerType.Banks)
    assert banks.real_value == 400.0
    assert banks.real_value > banks.box.hi_whisker


def test_null_summary_empty_ensemble():
    from ownet.nullmodel import NullEnsemble

    with pytest.raises(ValueError):
        null_summary(NullEnsemble((), (), ()), _mean_degree)
    assert math.isnan(summarize_values([{1: 1.0}], {}, "x")[0].real_value)
