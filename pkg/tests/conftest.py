import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

from ownet.graph import BipartiteNetwork, TypedProjection  # noqa: E402
from ownet.types import OwnerType  # noqa: E402

DATA = HERE / "data"


def graph(n, edges, types=None):
    return TypedProjection.from_edge_list(n, edges, types=None if types is None else np.asarray(types))


def bipartite(edges, types=None):
    """Bipartite network from (shareholder, company) pairs; default type Families."""
    sh = {s for s, _ in edges}
    labels = {s: (types or {}).get(s, OwnerType.Families) for s in sh}
    return BipartiteNetwork.from_edges(edges, labels)


def random_bipartite(rng, n_s, n_c, p):
    mask = rng.random((n_s, n_c)) < p
    s, c = np.nonzero(mask)
    edges = [(f"s{i}", f"c{j}") for i, j in zip(s.tolist(), c.tolist())]
    types = {f"s{i}": int(rng.integers(1, 14)) for i in range(n_s)}
    return edges, types


def clique_edges(nodes):
    nodes = list(nodes)
    return [(a, b) for i, a in enumerate(nodes) for b in nodes[i + 1:]]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def bridge_leaf_pair(n_cliques=10, size=4):
    """Two typed graphs of equal size built from a chain of cliques.

    In the first, Banks nodes are the only links between consecutive cliques;
    in the second, the cliques touch directly and Banks nodes hang off them
    as leaves. Every other node is Families.
    """
    fam, bank = int(OwnerType.Families), int(OwnerType.Banks)
    n_core = n_cliques * size
    cores = [list(range(c * size, (c + 1) * size)) for c in range(n_cliques)]
    base = [e for nodes in cores for e in clique_edges(nodes)]
    types = [fam] * n_core + [bank] * (n_cliques - 1)
    bridge = base + [
        e for c in range(n_cliques - 1) for e in ((cores[c][-1], n_core + c), (n_core + c, cores[c + 1][0]))
    ]
    leaf = base + [(cores[c][-1], cores[c + 1][0]) for c in range(n_cliques - 1)]
    leaf += [(cores[c][1], n_core + c) for c in range(n_cliques - 1)]
    return graph(len(types), bridge, types), graph(len(types), leaf, types)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
