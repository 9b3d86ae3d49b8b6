"""Graph data model: bipartite ownership networks and shareholder projections."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from . import _kernels
from ._parallel import chunked, run_tasks
from .types import N_TYPES, OwnerType


class LabelError(ValueError):
    """A shareholder has no (valid) owner-type label."""

    def __init__(self, message: str, offenders: Iterable[str] = ()):
        super().__init__(message)
        self.offenders = list(offenders)


def _id_key(x: str):
    # numeric ids sort numerically, everything else lexically after them
    return (0, int(x), "") if x.isdigit() else (1, 0, x)


def _frozen(arr, dtype) -> np.ndarray:
    out = np.array(arr, dtype=dtype, copy=True).reshape(-1)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class BipartiteNetwork:
    """Shareholder -> company investment network.

    Shareholders and companies are indexed densely; ``shareholder_ids`` and
    ``company_ids`` keep the external ids. A single external id may occur on
    both sides (a company that is itself a shareholder). Edges are stored
    sorted by (shareholder, company) with duplicates removed.
    """

    shareholder_ids: tuple[str, ...]
    company_ids: tuple[str, ...]
    edge_shareholder: np.ndarray
    edge_company: np.ndarray
    types: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.edge_shareholder, dtype=np.int64).reshape(-1)
        c = np.asarray(self.edge_company, dtype=np.int64).reshape(-1)
        if s.shape != c.shape:
            raise ValueError("edge arrays differ in length")
        n_s, n_c = len(self.shareholder_ids), len(self.company_ids)
        if len(s) and (s.min() < 0 or s.max() >= n_s or c.min() < 0 or c.max() >= n_c):
            raise ValueError("edge endpoint out of range")
        key = np.unique(s * max(n_c, 1) + c)
        object.__setattr__(self, "edge_shareholder", _frozen(key // max(n_c, 1), np.int64))
        object.__setattr__(self, "edge_company", _frozen(key % max(n_c, 1), np.int64))
        types = np.asarray(self.types, dtype=np.int8).reshape(-1)
        if len(types) != n_s:
            raise ValueError("need exactly one type label per shareholder")
        object.__setattr__(self, "types", _frozen(types, np.int8))
        object.__setattr__(self, "shareholder_ids", tuple(self.shareholder_ids))
        object.__setattr__(self, "company_ids", tuple(self.company_ids))

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[str, str]],
        types: Mapping[str, OwnerType | int],
    ) -> "BipartiteNetwork":
        """Build from external ``(shareholder, company)`` pairs and a label map.

        Shareholders are the sources that occur in ``edges``; labels for ids
        that never invest are ignored.
        """
        pairs = [(str(s), str(c)) for s, c in edges]
        sh = sorted({s for s, _ in pairs}, key=_id_key)
        co = sorted({c for _, c in pairs}, key=_id_key)
        missing = [s for s in sh if s not in types]
        if missing:
            shown = ", ".join(missing[:20]) + (" ..." if len(missing) > 20 else "")
            raise LabelError(f"{len(missing)} shareholder(s) without a type label: {shown}", missing)
        s_index = {s: i for i, s in enumerate(sh)}
        c_index = {c: i for i, c in enumerate(co)}
        es = np.fromiter((s_index[s] for s, _ in pairs), dtype=np.int64, count=len(pairs))
        ec = np.fromiter((c_index[c] for _, c in pairs), dtype=np.int64, count=len(pairs))
        labels = [int(OwnerType(int(types[s]))) for s in sh]
        return cls(tuple(sh), tuple(co), es, ec, np.asarray(labels, dtype=np.int8))

    @property
    def n_shareholders(self) -> int:
        return len(self.shareholder_ids)

    @property
    def n_companies(self) -> int:
        return len(self.company_ids)

    @property
    def n_edges(self) -> int:
        return len(self.edge_shareholder)

    def shareholder_degrees(self) -> np.ndarray:
        return np.bincount(self.edge_shareholder, minlength=self.n_shareholders)

    def company_degrees(self) -> np.ndarray:
        return np.bincount(self.edge_company, minlength=self.n_companies)

    def edge_set(self) -> set[tuple[str, str]]:
        return {
            (self.shareholder_ids[s], self.company_ids[c])
            for s, c in zip(self.edge_shareholder.tolist(), self.edge_company.tolist())
        }

    def type_map(self) -> dict[str, int]:
        return dict(zip(self.shareholder_ids, self.types.tolist()))

    def with_company_edges(self, edge_company: np.ndarray) -> "BipartiteNetwork":
        """Same shareholders, companies and labels; new company endpoint per edge."""
        return BipartiteNetwork(
            self.shareholder_ids, self.company_ids, self.edge_shareholder, edge_company, self.types
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, BipartiteNetwork):
            return NotImplemented
        return (
            self.shareholder_ids == other.shareholder_ids
            and self.company_ids == other.company_ids
            and np.array_equal(self.edge_shareholder, other.edge_shareholder)
            and np.array_equal(self.edge_company, other.edge_company)
            and np.array_equal(self.types, other.types)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class TypedProjection:
    """Simple undirected shareholder graph in CSR form with owner-type labels."""

    node_ids: tuple[str, ...]
    types: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    _edges: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "node_ids", tuple(self.node_ids))
        object.__setattr__(self, "types", _frozen(self.types, np.int8))
        object.__setattr__(self, "indptr", _frozen(self.indptr, np.int64))
        object.__setattr__(self, "indices", _frozen(self.indices, np.int64))
        if len(self.indptr) != len(self.node_ids) + 1 or len(self.types) != len(self.node_ids):
            raise ValueError("inconsistent projection arrays")

    @classmethod
    def from_edge_list(cls, n: int, edges, types=None, node_ids=None) -> "TypedProjection":
        """Build from undirected pairs over ``0..n-1``; loops and repeats are dropped."""
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        e = e[e[:, 0] != e[:, 1]]
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        adj = sparse.csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
        return cls._from_csr(adj, types, node_ids)

    @classmethod
    def _from_csr(cls, adj, types=None, node_ids=None) -> "TypedProjection":
        n = adj.shape[0]
        adj = adj.tocsr()
        adj.sum_duplicates()
        adj.sort_indices()
        if types is None:
            types = np.full(n, int(OwnerType.Families), dtype=np.int8)
        if node_ids is None:
            node_ids = [str(i) for i in range(n)]
        return cls(tuple(node_ids), types, adj.indptr, adj.indices)

    @property
    def n(self) -> int:
        return len(self.node_ids)

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of edges with ``i < j``, sorted."""
        if self._edges is None:
            rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
            keep = rows < self.indices
            e = np.column_stack([rows[keep], self.indices[keep]])
            e.setflags(write=False)
            object.__setattr__(self, "_edges", e)
        return self._edges

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in self.edges()}

    def adjacency(self) -> sparse.csr_matrix:
        data = np.ones(len(self.indices), dtype=np.int8)
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def subgraph(self, nodes) -> "TypedProjection":
        """Induced subgraph on ``nodes`` (kept in ascending order)."""
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        sub = self.adjacency()[nodes][:, nodes]
        return TypedProjection._from_csr(
            sub, self.types[nodes], [self.node_ids[i] for i in nodes.tolist()]
        )

    def type_counts(self) -> np.ndarray:
        """Node count per type id; index 0 unused."""
        return np.bincount(self.types, minlength=N_TYPES + 1)


def project(b: BipartiteNetwork) -> TypedProjection:
    """One-mode projection onto shareholders: linked iff they co-hold a company."""
    bad = np.flatnonzero((b.types < 1) | (b.types > N_TYPES))
    if len(bad):
        names = [b.shareholder_ids[i] for i in bad[:20]]
        raise LabelError(f"shareholder {names[0]!r} has no valid type label", names)
    inc = sparse.csr_matrix(
        (np.ones(b.n_edges, dtype=np.int32), (b.edge_shareholder, b.edge_company)),
        shape=(b.n_shareholders, b.n_companies),
    )
    co = (inc @ inc.T).tocsr()
    co.setdiag(0)
    co.eliminate_zeros()
    co.data[:] = 1
    return TypedProjection._from_csr(co.astype(np.int8), b.types, b.shareholder_ids)


class ComponentDecomposition(NamedTuple):
    labels: np.ndarray      # component id per node; ids ordered by smallest member
    sizes: np.ndarray       # node count per component id
    lcc_id: int
    n_lcc: int

    @property
    def n_components(self) -> int:
        return len(self.sizes)

    def members(self, cid: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cid)

    def lcc_nodes(self) -> np.ndarray:
        return self.members(self.lcc_id)


def components(p: TypedProjection) -> ComponentDecomposition:
    if p.n == 0:
        empty = np.zeros(0, dtype=np.int64)
        return ComponentDecomposition(empty, empty, -1, 0)
    _, raw = csgraph.connected_components(p.adjacency(), directed=False)
    # renumber so component ids follow their smallest node id
    _, first, inverse = np.unique(raw, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    labels = rank[inverse]
    sizes = np.bincount(labels)
    lcc = int(np.argmax(sizes))
    return ComponentDecomposition(labels, sizes, lcc, int(sizes[lcc]))


def largest_component(p: TypedProjection, comp: ComponentDecomposition | None = None) -> TypedProjection:
    comp = comp if comp is not None else components(p)
    return p.subgraph(comp.lcc_nodes())


class TwinClasses(NamedTuple):
    reps: np.ndarray      # lowest node of each class, ascending
    sizes: np.ndarray     # class sizes, aligned with ``reps``
    owner: np.ndarray     # class index of every node


def twin_classes(p: TypedProjection) -> TwinClasses:
    """Group nodes with identical closed neighbourhoods (true twins).

    Twins have the same distances and shortest-path counts to every other
    node and never lie on each other's shortest paths, so one BFS per class
    stands in for all of its members. Projections have many: shareholders
    of a single company are all twins.
    """
    owner = np.empty(p.n, dtype=np.int64)
    seen: dict[bytes, int] = {}
    reps = []
    for v in range(p.n):
        key = np.sort(np.append(p.indices[p.indptr[v]:p.indptr[v + 1]], v)).tobytes()
        c = seen.setdefault(key, len(seen))
        if c == len(reps):
            reps.append(v)
        owner[v] = c
    return TwinClasses(np.array(reps, dtype=np.int64), np.bincount(owner, minlength=len(reps)), owner)


def _distance_chunk(indptr, indices, sources):
    return _kernels.distance_stats(indptr, indices, sources)


def distance_stats(p: TypedProjection, jobs: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Per-node BFS distance sums and eccentricities (within each node's component)."""
    tw = twin_classes(p)
    spans = chunked(len(tw.reps))
    parts = run_tasks(_distance_chunk, [(p.indptr, p.indices, tw.reps[lo:hi]) for lo, hi in spans], jobs)
    dist_sum = np.zeros(len(tw.reps), dtype=np.int64)
    ecc = np.zeros(len(tw.reps), dtype=np.int32)
    for (lo, hi), (ds, ec) in zip(spans, parts):
        dist_sum[lo:hi] = ds[tw.reps[lo:hi]]
        ecc[lo:hi] = ec[tw.reps[lo:hi]]
    return dist_sum[tw.owner], ecc[tw.owner]


class PathStats(NamedTuple):
    diameter: int
    average_shortest_path: float


def shortest_path_stats(
    p: TypedProjection, comp: ComponentDecomposition | None = None, jobs: int | None = None
) -> PathStats | None:
    """Diameter and mean distance over unordered node pairs of the LCC.

    Returns ``None`` when the LCC is a single node.
    """
    lcc = largest_component(p, comp)
    if lcc.n < 2:
        return None
    dist_sum, ecc = distance_stats(lcc, jobs)
    pairs = lcc.n * (lcc.n - 1)
    return PathStats(int(ecc.max()), float(dist_sum.sum()) / pairs)


def clustering_coefficient(p: TypedProjection, scope=None, variant: str = "average") -> float:
    """Clustering over the nodes in ``scope`` (default: all nodes).

    ``variant="average"`` averages local coefficients, counting nodes of
    degree < 2 as 0. ``variant="global"`` is the transitivity ratio
    (closed / connected triples) restricted to the scope's centres.
    """
    nodes = np.arange(p.n) if scope is None else np.asarray(scope, dtype=np.int64)
    if len(nodes) == 0:
        raise ValueError("clustering scope is empty")
    local = _kernels.local_clustering(p.indptr, p.indices)
    if variant == "average":
        return float(local[nodes].mean())
    if variant == "global":
        k = p.degrees[nodes].astype(np.float64)
        triples = k * (k - 1)
        if triples.sum() == 0:
            return 0.0
        return float((local[nodes] * triples).sum() / triples.sum())
    raise ValueError(f"unknown clustering variant {variant!r}")
