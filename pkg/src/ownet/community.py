"""Community detection: Louvain modularity and a two-level map-equation optimiser.

Both optimisers share the same skeleton: nodes are visited in a seeded random
order and moved to the neighbouring community that best improves the
objective, then communities are collapsed into super-nodes and the process
repeats. Ties keep the node where it is, then prefer the lowest community id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .graph import TypedProjection, components
from .metrics import DegreeDistribution, distribution
from .nullmodel import derive_seed
from .types import OwnerType

LOUVAIN = "Louvain"
MAP_EQUATION = "MapEquation"
_EPS = 1e-12
RANDOM_THETA = 0.5
TUNE_PATIENCE = 10          # failed tuning rounds tolerated on small components
TUNE_PATIENCE_LARGE = 4     # ... and on components above SMALL_COMPONENT nodes
SMALL_COMPONENT = 64


@dataclass(frozen=True)
class CommunityPartition:
    """Node -> community assignment; ids are ordered by each community's smallest node."""

    assignment: np.ndarray
    method: str
    quality: float
    seed: int = 0
    history: tuple[float, ...] = field(default=())

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment) if self.n else np.zeros(0, dtype=np.int64)

    @property
    def n_communities(self) -> int:
        return len(self.sizes)

    def members(self, cid: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == cid)


def canonical(labels) -> np.ndarray:
    """Relabel so community ids follow the order of first appearance."""
    labels = np.asarray(labels)
    if len(labels) == 0:
        return np.zeros(0, dtype=np.int64)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse.reshape(-1)]


# --------------------------------------------------------------------------
# weighted working graph

class _Graph:
    """Weighted undirected graph as adjacency lists; ``loops[i]`` is A_ii.

    Following the aggregated-adjacency convention, ``A_ii`` counts each
    internal edge twice so that ``strength[i] = sum_j A_ij``.
    """

    __slots__ = ("n", "nbrs", "wts", "loops", "strength")

    def __init__(self, n, nbrs, wts, loops):
        self.n = n
        self.nbrs = nbrs
        self.wts = wts
        self.loops = loops
        self.strength = [loops[i] + sum(wts[i]) for i in range(n)]

    @classmethod
    def from_projection(cls, p: TypedProjection, nodes=None) -> "_Graph":
        if nodes is None:
            ptr = p.indptr.tolist()
            idx = p.indices.tolist()
            n = p.n
            nbrs = [idx[ptr[i]:ptr[i + 1]] for i in range(n)]
        else:
            local = {v: i for i, v in enumerate(nodes)}
            nbrs = [[local[u] for u in p.neighbors(v).tolist()] for v in nodes]
            n = len(nodes)
        return cls(n, nbrs, [[1.0] * len(r) for r in nbrs], [0.0] * n)

    def aggregate(self, labels: list[int], k: int) -> "_Graph":
        acc: list[dict[int, float]] = [dict() for _ in range(k)]
        loops = [0.0] * k
        for i in range(self.n):
            ci = labels[i]
            loops[ci] += self.loops[i]
            row = acc[ci]
            for j, w in zip(self.nbrs[i], self.wts[i]):
                cj = labels[j]
                if cj == ci:
                    loops[ci] += w
                else:
                    row[cj] = row.get(cj, 0.0) + w
        nbrs = [sorted(r) for r in acc]
        wts = [[acc[c][d] for d in nbrs[c]] for c in range(k)]
        return _Graph(k, nbrs, wts, loops)


def _compact(labels: list[int]) -> tuple[list[int], int]:
    remap: dict[int, int] = {}
    out = []
    for c in labels:
        if c not in remap:
            remap[c] = len(remap)
        out.append(remap[c])
    return out, len(remap)


# --------------------------------------------------------------------------
# modularity

def modularity(p: TypedProjection, assignment) -> float:
    """Q = (1/2m) sum_ij [A_ij - k_i k_j / 2m] delta(c_i, c_j)."""
    if p.m == 0:
        return 0.0
    a = np.asarray(assignment, dtype=np.int64)
    two_m = 2.0 * p.m
    e = p.edges()
    internal = float((a[e[:, 0]] == a[e[:, 1]]).sum()) * 2.0
    tot = np.bincount(a, weights=p.degrees.astype(np.float64))
    return internal / two_m - float((tot**2).sum()) / two_m**2


def _louvain_move(g: _Graph, two_m: float, rng: np.random.Generator) -> tuple[list[int], bool]:
    comm = list(range(g.n))
    tot = list(g.strength)
    k = g.strength
    moved_any = False
    order = rng.permutation(g.n).tolist()
    while True:
        moved = 0
        for i in order:
            ci = comm[i]
            links: dict[int, float] = {}
            for j, w in zip(g.nbrs[i], g.wts[i]):
                cj = comm[j]
                links[cj] = links.get(cj, 0.0) + w
            tot[ci] -= k[i]
            ki = k[i] / two_m
            best_c = ci
            best = links.get(ci, 0.0) - tot[ci] * ki
            for c in sorted(links):
                gain = links[c] - tot[c] * ki
                if gain > best + _EPS:
                    best, best_c = gain, c
            tot[best_c] += k[i]
            if best_c != ci:
                comm[i] = best_c
                moved += 1
        if moved == 0:
            break
        moved_any = True
    return comm, moved_any


def louvain(p: TypedProjection, seed: int = 0) -> CommunityPartition:
    """Multi-level modularity maximisation.

    ``history`` lists the modularity of the partition after each level.
    """
    if p.m < 1:
        raise ValueError("louvain needs at least one edge")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    g = _Graph.from_projection(p)
    two_m = 2.0 * p.m
    labels = list(range(p.n))
    history = [modularity(p, labels)]
    while True:
        comm, moved = _louvain_move(g, two_m, rng)
        if not moved:
            break
        comm, k = _compact(comm)
        labels = [comm[c] for c in labels]
        history.append(modularity(p, labels))
        if k == g.n:
            break
        g = g.aggregate(comm, k)
    assignment = canonical(labels)
    return CommunityPartition(assignment, LOUVAIN, modularity(p, assignment), seed, tuple(history))


# --------------------------------------------------------------------------
# map equation

def _plogp(x: float) -> float:
    return x * math.log(x) if x > 0 else 0.0


def _codelength(exit_flow, module_flow, node_entropy_term: float) -> float:
    """Two-level codelength from per-module exit and visit flows.

    ``node_entropy_term`` is sum_a p_a ln p_a over the nodes.
    """
    q = sum(exit_flow)
    return (
        _plogp(q)
        - 2.0 * sum(_plogp(x) for x in exit_flow)
        - node_entropy_term
        + sum(_plogp(x + y) for x, y in zip(exit_flow, module_flow))
    )


def _component_codelength(p: TypedProjection, nodes: np.ndarray, labels: np.ndarray) -> float:
    k = p.degrees[nodes].astype(np.float64)
    two_m = k.sum()
    pa = k / two_m
    local = {int(v): i for i, v in enumerate(nodes.tolist())}
    mods, lab = np.unique(labels, return_inverse=True)
    lab = lab.reshape(-1)
    exit_flow = np.zeros(len(mods))
    for v in nodes.tolist():
        lv = lab[local[v]]
        for u in p.neighbors(v).tolist():
            if lab[local[u]] != lv:
                exit_flow[lv] += 1.0 / two_m
    module_flow = np.bincount(lab, weights=pa, minlength=len(mods))
    node_term = float(sum(_plogp(x) for x in pa))
    return _codelength(exit_flow.tolist(), module_flow.tolist(), node_term)


def map_equation(partition: CommunityPartition | np.ndarray, p: TypedProjection, base: float = math.e) -> float:
    """Two-level map-equation codelength L(M) of ``partition`` on ``p``.

    Visit rates are k / 2m. Each connected component is scored with its own
    random walk and the results are averaged with weights m_c / m; isolated
    nodes contribute nothing. Natural-log units unless ``base`` is given.
    """
    a = partition.assignment if isinstance(partition, CommunityPartition) else np.asarray(partition)
    if len(a) != p.n:
        raise ValueError("partition does not cover the projection's nodes")
    if len(a) and (np.bincount(np.asarray(a, dtype=np.int64)) == 0).any():
        raise ValueError("partition has an empty module")
    if p.m == 0:
        return 0.0
    comp = components(p)
    total = 0.0
    for cid in np.flatnonzero(comp.sizes > 1).tolist():
        nodes = comp.members(cid)
        m_c = p.degrees[nodes].sum() / 2.0
        total += (m_c / p.m) * _component_codelength(p, nodes, a[nodes])
    return total / math.log(base)


class _FlowState:
    """Module flows for the map equation on a working graph.

    ``pl_exit[c]`` and ``pl_total[c]`` cache plogp(exit) and
    plogp(exit + flow) of module ``c``.
    """

    def __init__(self, g: _Graph, two_m: float, node_term: float):
        self.g = g
        self.flow = [s / two_m for s in g.strength]                # p_a
        self.out = [sum(w) / two_m for w in g.wts]                 # flow leaving a (no self loops)
        self.wts = [[w / two_m for w in row] for row in g.wts]
        self.node_term = node_term
        self.set_partition(list(range(g.n)))

    def codelength(self) -> float:
        return _plogp(self.sum_exit) - 2.0 * self.sum_plogp_exit - self.node_term + self.sum_plogp_total

    def set_partition(self, labels: list[int]) -> None:
        n = self.g.n
        self.comm = list(labels)
        k = max(max(labels) + 1 if labels else 0, n)
        mflow = [0.0] * k
        mexit = [0.0] * k
        for a in range(n):
            ca = labels[a]
            mflow[ca] += self.flow[a]
            for b, w in zip(self.g.nbrs[a], self.wts[a]):
                if labels[b] != ca:
                    mexit[ca] += w
        self.mflow, self.mexit = mflow, mexit
        self.pl_exit = [_plogp(x) for x in mexit]
        self.pl_total = [_plogp(x + y) for x, y in zip(mexit, mflow)]
        self.sum_exit = sum(mexit)
        self.sum_plogp_exit = sum(self.pl_exit)
        self.sum_plogp_total = sum(self.pl_total)

    def sweep(self, rng: np.random.Generator, theta: float = 0.0, singletons_only: bool = False) -> int:
        """One pass of moves; returns the number of nodes moved.

        With ``theta == 0`` each node takes its best move. Otherwise it picks
        among the improving moves at random, weighted by
        ``exp(-(L_c - L_best) / (theta * (L_stay - L_best)))``. With
        ``singletons_only`` only nodes still alone in their module may move,
        so groups grow around seeds and never lose members.
        """
        g = self.g
        comm = self.comm
        mflow, mexit = self.mflow, self.mexit
        pl_exit, pl_total = self.pl_exit, self.pl_total
        flow, out, wts, nbrs = self.flow, self.out, self.wts, g.nbrs
        log = math.log
        used = set(comm)
        empties = [c for c in range(len(mflow)) if c not in used]
        moved = 0
        size = None
        if singletons_only:
            size = [0] * len(mflow)
            for c in comm:
                size[c] += 1
        for a in rng.permutation(g.n).tolist():
            ca = comm[a]
            if size is not None and size[ca] != 1:
                continue
            links: dict[int, float] = {}
            for b, w in zip(nbrs[a], wts[a]):
                cb = comm[b]
                links[cb] = links.get(cb, 0.0) + w
            pa, oa = flow[a], out[a]
            w_old = links.pop(ca, 0.0)
            # take a out of its module
            exit_a = mexit[ca] - oa + 2.0 * w_old
            flow_a = mflow[ca] - pa
            if exit_a < 1e-15:
                exit_a = 0.0
            pe_a = exit_a * log(exit_a) if exit_a > 0.0 else 0.0
            pt_a = (exit_a + flow_a) * log(exit_a + flow_a) if exit_a + flow_a > 0.0 else 0.0
            base_exit = self.sum_exit - mexit[ca]
            base_pe = self.sum_plogp_exit - pl_exit[ca]
            base_pt = self.sum_plogp_total - pl_total[ca]

            cands = sorted(links)
            if flow_a > 0.0 and empties and size is None:
                cands.append(empties[-1])
            # staying put: a rejoins its own (reduced) module
            cands.insert(0, ca)
            vals = []
            for c in cands:
                if c == ca:
                    e0, f0, pe0, pt0, w_c = exit_a, flow_a, pe_a, pt_a, w_old
                else:
                    e0, f0, pe0, pt0, w_c = mexit[c], mflow[c], pl_exit[c], pl_total[c], links.get(c, 0.0)
                e1 = e0 + oa - 2.0 * w_c
                if e1 < 1e-15:
                    e1 = 0.0
                t1 = e1 + f0 + pa
                tot_exit = base_exit + exit_a - e0 + e1
                pe = base_pe + pe_a - pe0 + (e1 * log(e1) if e1 > 0.0 else 0.0)
                pt = base_pt + pt_a - pt0 + t1 * log(t1)
                vals.append((tot_exit * log(tot_exit) if tot_exit > 0.0 else 0.0) - 2.0 * pe + pt)
            stay = vals[0]
            best, best_c = stay, ca
            for c, val in zip(cands[1:], vals[1:]):
                if val < best - _EPS:
                    best, best_c = val, c
            if theta > 0.0 and best_c != ca:
                better = [(c, v) for c, v in zip(cands[1:], vals[1:]) if v < stay - _EPS]
                if len(better) > 1:
                    bv = np.array([v for _, v in better])
                    w = np.exp(-(bv - best) / (theta * (stay - best)))
                    best_c = better[int(rng.choice(len(better), p=w / w.sum()))][0]
            if best_c == ca:
                continue
            w_new = links.get(best_c, 0.0)
            e1 = mexit[best_c] + oa - 2.0 * w_new
            if e1 < 1e-15:
                e1 = 0.0
            f1 = mflow[best_c] + pa
            # commit: a leaves ca and joins best_c
            self.sum_exit += (exit_a - mexit[ca]) + (e1 - mexit[best_c])
            new_pe1 = e1 * log(e1) if e1 > 0.0 else 0.0
            new_pt1 = (e1 + f1) * log(e1 + f1)
            self.sum_plogp_exit += (pe_a - pl_exit[ca]) + (new_pe1 - pl_exit[best_c])
            self.sum_plogp_total += (pt_a - pl_total[ca]) + (new_pt1 - pl_total[best_c])
            mexit[ca], mflow[ca], pl_exit[ca], pl_total[ca] = exit_a, flow_a, pe_a, pt_a
            mexit[best_c], mflow[best_c], pl_exit[best_c], pl_total[best_c] = e1, f1, new_pe1, new_pt1
            if empties and best_c == empties[-1]:
                empties.pop()
            if flow_a <= 1e-15:
                mexit[ca] = mflow[ca] = pl_exit[ca] = pl_total[ca] = 0.0
                empties.append(ca)
            comm[a] = best_c
            moved += 1
            if size is not None:
                size[ca] -= 1
                size[best_c] += 1
        return moved


def _optimise_levels(
    g0: _Graph, two_m: float, node_term: float, rng, init: list[int] | None = None, theta: float = 0.0
):
    """Local moving + aggregation from ``init`` (default singletons) on graph ``g0``.

    ``theta`` randomises the first sweep of each level (see ``_FlowState.sweep``).
    """
    labels = list(range(g0.n)) if init is None else list(init)
    g = g0
    if init is not None:
        labels, k = _compact(labels)
        g = g0.aggregate(labels, k)
    while True:
        st = _FlowState(g, two_m, node_term)
        moved_total = 0
        first = theta
        while True:
            moved = st.sweep(rng, first)
            first = 0.0
            moved_total += moved
            if moved == 0:
                break
        if moved_total == 0:
            break
        comm, k = _compact(st.comm)
        labels = [comm[c] for c in labels]
        if k == g.n or k == 1:
            break
        g = g.aggregate(comm, k)
    return labels


def _labels_codelength(g0: _Graph, two_m: float, node_term: float, labels: list[int]) -> float:
    st = _FlowState(g0, two_m, node_term)
    st.set_partition(_compact(labels)[0])
    return st.codelength()


def _fine_tune(g0: _Graph, two_m: float, node_term: float, labels: list[int], rng) -> list[int]:
    st = _FlowState(g0, two_m, node_term)
    st.set_partition(_compact(labels)[0])
    while st.sweep(rng):
        pass
    return st.comm


def _subgraph(g: _Graph, nodes: list[int]) -> _Graph:
    local = {v: i for i, v in enumerate(nodes)}
    nbrs, wts = [], []
    for v in nodes:
        row = [(local[u], w) for u, w in zip(g.nbrs[v], g.wts[v]) if u in local]
        nbrs.append([u for u, _ in row])
        wts.append([w for _, w in row])
    return _Graph(len(nodes), nbrs, wts, [g.loops[v] for v in nodes])


def _coarse_tune(g0: _Graph, two_m: float, node_term: float, labels: list[int], rng) -> list[int]:
    """Split every module into submodules and let the submodules move as units.

    This reaches partitions that need several nodes to leave a module together,
    which single-node moves cannot.
    """
    labels, k = _compact(labels)
    groups: list[list[int]] = [[] for _ in range(k)]
    for v, c in enumerate(labels):
        groups[c].append(v)
    sub = [0] * g0.n
    parent = []
    for c, nodes in enumerate(groups):
        sg = _subgraph(g0, nodes)
        if sum(sg.strength) > 0:
            s_two_m = float(sum(sg.strength))
            s_term = sum(_plogp(x / s_two_m) for x in sg.strength)
            sst = _FlowState(sg, s_two_m, s_term)
            sst.sweep(rng, RANDOM_THETA, singletons_only=True)
            local = _compact(sst.comm)[0]
        else:
            local = list(range(len(nodes)))
        base = len(parent)
        for v, s in zip(nodes, local):
            sub[v] = base + s
        parent.extend([c] * (max(local) + 1))
    g = g0.aggregate(sub, len(parent))
    st = _FlowState(g, two_m, node_term)
    st.set_partition(parent)
    while st.sweep(rng):
        pass
    return [st.comm[sub[v]] for v in range(g0.n)]


def _tune(g0: _Graph, two_m: float, node_term: float, labels: list[int], rng, patience: int = TUNE_PATIENCE):
    """Alternate fine (single node) and coarse (submodule) tuning until ``patience`` rounds fail."""
    length = _labels_codelength(g0, two_m, node_term, labels)
    coarse = False
    stale = 0
    while stale < patience:
        if coarse:
            tuned = _coarse_tune(g0, two_m, node_term, labels, rng)
        else:
            tuned = _fine_tune(g0, two_m, node_term, labels, rng)
        coarse = not coarse
        tuned = _optimise_levels(g0, two_m, node_term, rng, init=tuned)
        tuned_len = _labels_codelength(g0, two_m, node_term, tuned)
        if tuned_len < length - _EPS:
            labels, length = tuned, tuned_len
            stale = 0
        else:
            stale += 1
    return labels, length


def _infomap_component(g0: _Graph, rng, trials: int) -> tuple[list[int], float]:
    two_m = float(sum(g0.strength))
    node_term = sum(_plogp(s / two_m) for s in g0.strength)
    patience = TUNE_PATIENCE if g0.n <= SMALL_COMPONENT else TUNE_PATIENCE_LARGE
    # the one-module partition is tuned as a start of its own
    best_labels, best_len = _tune(g0, two_m, node_term, [0] * g0.n, rng, patience)
    for trial in range(trials):
        start = _optimise_levels(g0, two_m, node_term, rng, theta=0.0 if trial == 0 else RANDOM_THETA)
        labels, length = _tune(g0, two_m, node_term, start, rng, patience)
        if length < best_len - _EPS:
            best_labels, best_len = labels, length
    return best_labels, best_len


def infomap_optimize(p: TypedProjection, seed: int = 0, trials: int = 4) -> CommunityPartition:
    """Minimise the two-level map equation, one connected component at a time.

    Each component runs ``trials`` independent optimisations (local moving
    and aggregation, then alternating fine and coarse tuning) plus a tuned
    one-module start, and keeps the shortest.
    """
    if p.m < 1:
        raise ValueError("infomap_optimize needs at least one edge")
    comp = components(p)
    labels = np.empty(p.n, dtype=np.int64)
    next_id = 0
    total = 0.0
    # small components recur with identical wiring (e.g. the clique of a
    # single company); solve each labelled shape once
    memo: dict[tuple, tuple[list[int], float]] = {}
    for cid in range(comp.n_components):
        nodes = comp.members(cid)
        if len(nodes) <= 2:
            labels[nodes] = next_id
            next_id += 1
            if len(nodes) == 2:
                total += (1.0 / p.m) * math.log(2.0)
            continue
        key = None
        if len(nodes) <= SMALL_COMPONENT:
            nodes = nodes[np.lexsort((nodes, p.degrees[nodes]))]
            pos = {v: i for i, v in enumerate(nodes.tolist())}
            key = tuple(sorted(
                (pos[v], pos[u]) for v in nodes.tolist() for u in p.neighbors(v).tolist() if pos[v] < pos[u]
            ))
        if key is not None and key in memo:
            local, length = memo[key]
        else:
            rng = np.random.default_rng(np.random.SeedSequence(derive_seed(seed, cid)))
            local, length = _infomap_component(_Graph.from_projection(p, nodes.tolist()), rng, trials)
            local = _compact(local)[0]
            if key is not None:
                memo[key] = (local, length)
        labels[nodes] = np.asarray(local, dtype=np.int64) + next_id
        next_id += max(local) + 1
        total += (p.degrees[nodes].sum() / 2.0 / p.m) * length
    return CommunityPartition(canonical(labels), MAP_EQUATION, total, seed)


# --------------------------------------------------------------------------
# summaries

class SizeSummary(NamedTuple):
    n_communities: int
    avg_size: float
    max_size: int
    avg_size_excluding_singletons: float
    distribution: DegreeDistribution


def size_distribution(c: CommunityPartition, bin_ratio: float = 2.0, fit_range=None) -> SizeSummary:
    """Community-size histogram, log-binned power-law fit and the headline counts."""
    sizes = c.sizes
    multi = sizes[sizes > 1]
    return SizeSummary(
        len(sizes),
        float(sizes.mean()) if len(sizes) else 0.0,
        int(sizes.max()) if len(sizes) else 0,
        float(multi.mean()) if len(multi) else math.nan,
        distribution(sizes, bin_ratio, fit_range),
    )


N_COMPOSITION_BINS = 20


class CompositionHistogram(NamedTuple):
    focal: OwnerType
    min_size: int
    community_ids: np.ndarray
    fractions: np.ndarray
    counts: np.ndarray          # 20 bins over [0, 1]; a fraction of 1.0 goes in the last bin

    @property
    def bin_edges(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, N_COMPOSITION_BINS + 1)


def composition(
    c: CommunityPartition, p: TypedProjection, focal: OwnerType | int, min_size: int = 1
) -> CompositionHistogram:
    """Fraction of ``focal``-type members in each community of at least ``min_size`` nodes."""
    focal = OwnerType(int(focal))
    if c.n != p.n:
        raise ValueError("partition and projection differ in size")
    sizes = c.sizes
    hits = np.bincount(c.assignment, weights=(p.types == int(focal)).astype(np.float64), minlength=len(sizes))
    hits = hits.round().astype(np.int64)
    keep = np.flatnonzero(sizes >= min_size)
    frac = hits[keep] / sizes[keep]
    bins = np.minimum((hits[keep] * N_COMPOSITION_BINS) // sizes[keep], N_COMPOSITION_BINS - 1)
    counts = np.bincount(bins, minlength=N_COMPOSITION_BINS)
    return CompositionHistogram(focal, min_size, keep, frac, counts)


class ComparisonRow(NamedTuple):
    rank: int
    community_id: int
    size: int
    n_types: int
    contained_pct: float     # share of this community inside its best-overlapping partner
    partner_id: int
    partner_size: int
    partner_n_types: int
    partner_rank: int        # 1-based size rank of the partner in the other partition
    identical: bool


@dataclass(frozen=True)
class MethodComparison:
    rows: tuple[ComparisonRow, ...]
    exact_match_fraction: float     # nodes whose two communities are the same node set
    containment_fraction: float     # nodes whose first-method community sits inside the second's


def _size_ranks(sizes: np.ndarray) -> np.ndarray:
    order = np.lexsort((np.arange(len(sizes)), -sizes))
    ranks = np.empty(len(sizes), dtype=np.int64)
    ranks[order] = np.arange(1, len(sizes) + 1)
    return ranks


def compare_methods(
    a: CommunityPartition, b: CommunityPartition, p: TypedProjection | None = None, top: int = 10
) -> MethodComparison:
    """Compare partition ``a`` against ``b``: per top-``top`` community of ``a`` and globally."""
    if a.n != b.n or (p is not None and p.n != a.n):
        raise ValueError("partitions cover different node sets")
    n = a.n
    pair = a.assignment.astype(np.int64) * max(b.n_communities, 1) + b.assignment
    keys, overlap = np.unique(pair, return_counts=True)
    ka, kb = keys // max(b.n_communities, 1), keys % max(b.n_communities, 1)
    size_a, size_b = a.sizes, b.sizes
    # best partner of each a-community: largest overlap, then lowest id
    best = {}
    for ca, cb, ov in zip(ka.tolist(), kb.tolist(), overlap.tolist()):
        if ca not in best or ov > best[ca][1]:
            best[ca] = (cb, ov)
    identical_a = np.zeros(len(size_a), dtype=bool)
    contained_a = np.zeros(len(size_a), dtype=bool)
    for ca, (cb, ov) in best.items():
        contained_a[ca] = ov == size_a[ca]
        identical_a[ca] = ov == size_a[ca] and ov == size_b[cb]

    def n_types(assign, cid):
        if p is None:
            return 0
        return len(np.unique(p.types[assign == cid]))

    ranks_a, ranks_b = _size_ranks(size_a), _size_ranks(size_b)
    rows = []
    for ca in np.argsort(ranks_a)[:top].tolist():
        cb, ov = best[ca]
        rows.append(ComparisonRow(
            int(ranks_a[ca]), ca, int(size_a[ca]), n_types(a.assignment, ca),
            100.0 * ov / size_a[ca], cb, int(size_b[cb]), n_types(b.assignment, cb),
            int(ranks_b[cb]), bool(identical_a[ca]),
        ))
    exact = float(size_a[identical_a].sum()) / n if n else 1.0
    contained = float(size_a[contained_a].sum()) / n if n else 1.0
    return MethodComparison(tuple(rows), exact, contained)
