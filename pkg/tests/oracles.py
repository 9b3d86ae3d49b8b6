"""Independent brute-force oracles used by the test suite.

Everything here is deliberately naive and shares no code with the package
beyond plain data containers.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from functools import lru_cache

import numpy as np


# ---------------------------------------------------------------- projection

def brute_projection(edges):
    """Shareholder pairs that co-hold at least one company, by double loop."""
    holders = {}
    for s, c in edges:
        holders.setdefault(c, set()).add(s)
    pairs = set()
    for c, ss in holders.items():
        for a in ss:
            for b in ss:
                if a != b:
                    pairs.add((min(a, b), max(a, b)))
    return pairs


# ---------------------------------------------------------------- paths

def adjacency_lists(n, edges):
    adj = [set() for _ in range(n)]
    for u, v in edges:
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    return adj


def bfs_dist(adj, s):
    dist = {s: 0}
    q = deque([s])
    while q:
        v = q.popleft()
        for u in adj[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                q.append(u)
    return dist


def all_shortest_paths(adj, s, t):
    """Enumerate every shortest s-t path explicitly."""
    dist = bfs_dist(adj, s)
    if t not in dist:
        return []
    paths = []

    def walk(path):
        v = path[-1]
        if v == t:
            paths.append(list(path))
            return
        for u in adj[v]:
            if dist.get(u) == dist[v] + 1 and len(path) <= dist[t]:
                path.append(u)
                walk(path)
                path.pop()

    walk([s])
    return [p for p in paths if len(p) == dist[t] + 1]


def brute_betweenness(n, edges):
    """Unordered-pair betweenness by explicit path enumeration."""
    adj = adjacency_lists(n, edges)
    bc = [0.0] * n
    for s, t in itertools.combinations(range(n), 2):
        paths = all_shortest_paths(adj, s, t)
        if not paths:
            continue
        for v in range(n):
            if v in (s, t):
                continue
            bc[v] += sum(v in p for p in paths) / len(paths)
    return bc


def brute_closeness(n, edges):
    """(reachable - 1) / total distance within each node's component; nan if isolated."""
    adj = adjacency_lists(n, edges)
    out = []
    for s in range(n):
        d = bfs_dist(adj, s)
        tot = sum(d.values())
        out.append((len(d) - 1) / tot if tot else math.nan)
    return out


def brute_component_count(n, edges, removed):
    alive = [v for v in range(n) if v not in removed]
    adj = adjacency_lists(n, [(u, v) for u, v in edges if u not in removed and v not in removed])
    seen, count = set(), 0
    for v in alive:
        if v not in seen:
            count += 1
            seen |= set(bfs_dist(adj, v))
    return count


# ---------------------------------------------------------------- map equation

@lru_cache(maxsize=None)
def set_partitions(n):
    """All set partitions of n items as restricted growth strings (Bell(n) rows)."""
    rows = []
    a = [0] * n

    def rec(i, m):
        if i == n:
            rows.append(list(a))
            return
        for c in range(m + 1):
            a[i] = c
            rec(i + 1, max(m, c + 1))

    if n:
        rec(1, 1)
    return np.array(rows, dtype=np.int64)


def _h(probs):
    """Shannon entropy (nats) of the normalised rows of ``probs``; zero rows give 0."""
    tot = probs.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(tot > 0, probs / tot, 0.0)
        lg = np.where(q > 0, np.log(np.where(q > 0, q, 1.0)), 0.0)
    return -(q * lg).sum(axis=-1)


def all_codelengths(n, edges):
    """Two-level map equation for every set partition of a connected graph.

    Written in the ``q H(Q) + sum_i p_i H(P_i)`` form: index codebook over
    module exit rates, module codebooks over member visit rates plus exit.
    """
    parts = set_partitions(n)
    e = np.asarray(edges, dtype=np.int64)
    deg = np.bincount(e.ravel(), minlength=n).astype(float)
    two_m = deg.sum()
    visit = deg / two_m
    onehot = (parts[:, :, None] == np.arange(n)[None, None, :]).astype(float)   # B x node x module
    cut = (parts[:, e[:, 0]] != parts[:, e[:, 1]]).astype(float)                # B x E
    exit_ = (cut[:, :, None] * (onehot[:, e[:, 0], :] + onehot[:, e[:, 1], :])).sum(axis=1) / two_m
    q = exit_.sum(axis=1)
    index_term = q * _h(exit_)
    member = onehot * visit[None, :, None]                                      # B x node x module
    book = np.concatenate([member.transpose(0, 2, 1), exit_[:, :, None]], axis=2)  # B x module x (node+exit)
    p_circ = book.sum(axis=2)
    module_term = (p_circ * _h(book)).sum(axis=1)
    return parts, index_term + module_term


def exhaustive_min_codelength(n, edges):
    parts, lengths = all_codelengths(n, edges)
    i = int(np.argmin(lengths))
    return float(lengths[i]), parts[i]


def brute_modularity(n, edges, labels):
    deg = [0] * n
    a = np.zeros((n, n))
    for u, v in edges:
        a[u, v] = a[v, u] = 1
        deg[u] += 1
        deg[v] += 1
    m = len(edges)
    q = 0.0
    for i in range(n):
        for j in range(n):
            if labels[i] == labels[j]:
                q += a[i, j] - deg[i] * deg[j] / (2 * m)
    return q / (2 * m)


# ---------------------------------------------------------------- graph data

def parse_graph6(line: str):
    """Decode one graph6 record (n <= 62) into ``(n, edges)``."""
    data = [ord(ch) - 63 for ch in line.strip()]
    n, body = data[0], data[1:]
    bits = [(byte >> (5 - k)) & 1 for byte in body for k in range(6)]
    edges, pos = [], 0
    for j in range(1, n):
        for i in range(j):
            if bits[pos]:
                edges.append((i, j))
            pos += 1
    return n, edges


def read_graph6(path):
    with open(path, encoding="ascii") as fh:
        return [parse_graph6(line) for line in fh if line.strip()]
