"""Pure-Python implementations of the hot loops.

Every function here has a twin in ``_ckernels.pyx`` with the same signature
and bit-identical output. Graphs are passed in CSR form (``indptr``,
``indices``) over dense node ids ``0..n-1``.
"""

from collections import deque

import numpy as np


def brandes(indptr, indices, sources, weights=None):
    """Single-source shortest-path passes from each node in ``sources``.

    Returns ``(dependency, dist_sum, ecc)``. ``dependency`` is the
    accumulated pair dependency summed over ordered (source, target) pairs,
    so halving it gives betweenness over unordered pairs. Source ``i``'s
    dependencies are scaled by ``weights[i]`` (default 1). ``dist_sum`` and
    ``ecc`` are only filled for the nodes in ``sources``.
    """
    n = len(indptr) - 1
    ptr = indptr.tolist()
    nbr = indices.tolist()
    dependency = [0.0] * n
    dist_sum = np.zeros(n, dtype=np.int64)
    ecc = np.zeros(n, dtype=np.int32)
    dist = [-1] * n
    sigma = [0.0] * n
    delta = [0.0] * n
    wts = [1.0] * len(sources) if weights is None else np.asarray(weights, dtype=np.float64).tolist()
    for s, ws in zip(sources.tolist(), wts):
        order = [s]
        dist[s] = 0
        sigma[s] = 1.0
        head = 0
        total = 0
        while head < len(order):
            v = order[head]
            head += 1
            dv = dist[v]
            total += dv
            sv = sigma[v]
            for j in range(ptr[v], ptr[v + 1]):
                w = nbr[j]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    order.append(w)
                if dist[w] == dv + 1:
                    sigma[w] += sv
        dist_sum[s] = total
        ecc[s] = dist[order[-1]]
        for w in reversed(order):
            dw = dist[w]
            coeff = (1.0 + delta[w]) / sigma[w]
            for j in range(ptr[w], ptr[w + 1]):
                v = nbr[j]
                if dist[v] == dw - 1:
                    delta[v] += sigma[v] * coeff
            if w != s:
                dependency[w] += ws * delta[w]
        for w in order:
            dist[w] = -1
            sigma[w] = 0.0
            delta[w] = 0.0
    return np.asarray(dependency, dtype=np.float64), dist_sum, ecc


def distance_stats(indptr, indices, sources):
    """BFS distance sums and eccentricities for each node in ``sources``."""
    n = len(indptr) - 1
    ptr = indptr.tolist()
    nbr = indices.tolist()
    dist_sum = np.zeros(n, dtype=np.int64)
    ecc = np.zeros(n, dtype=np.int32)
    dist = [-1] * n
    for s in sources.tolist():
        dist[s] = 0
        queue = deque([s])
        seen = [s]
        total = 0
        last = 0
        while queue:
            v = queue.popleft()
            dv = dist[v]
            total += dv
            last = dv
            for j in range(ptr[v], ptr[v + 1]):
                w = nbr[j]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue.append(w)
                    seen.append(w)
        dist_sum[s] = total
        ecc[s] = last
        for w in seen:
            dist[w] = -1
    return dist_sum, ecc


def local_clustering(indptr, indices):
    """Local clustering coefficient of every node (0 where degree < 2)."""
    n = len(indptr) - 1
    ptr = indptr.tolist()
    nbr = indices.tolist()
    out = np.zeros(n, dtype=np.float64)
    mark = [False] * n
    for v in range(n):
        k = ptr[v + 1] - ptr[v]
        if k < 2:
            continue
        row = nbr[ptr[v]:ptr[v + 1]]
        for u in row:
            mark[u] = True
        links = 0
        for u in row:
            for j in range(ptr[u], ptr[u + 1]):
                if mark[nbr[j]]:
                    links += 1
        for u in row:
            mark[u] = False
        out[v] = links / (k * (k - 1))
    return out


def rewire_swaps(src, dst, n_companies, picks_a, picks_b, target, max_fail, fails):
    """Apply double-edge swaps in place on the bipartite edge arrays.

    Consumes candidate edge pairs ``(picks_a[i], picks_b[i])`` in order until
    ``target`` swaps succeed, the picks run out, or ``max_fail`` consecutive
    attempts are rejected. ``fails`` carries the running count of
    consecutive rejections across calls.

    Returns ``(done, consumed, fails)``.
    """
    present = set((src.astype(np.int64) * n_companies + dst).tolist())
    s_list = src.tolist()
    d_list = dst.tolist()
    a_list = picks_a.tolist()
    b_list = picks_b.tolist()
    done = 0
    i = 0
    n_picks = len(a_list)
    while done < target and i < n_picks:
        if fails >= max_fail:
            break
        a = a_list[i]
        b = b_list[i]
        i += 1
        s1 = s_list[a]
        c1 = d_list[a]
        s2 = s_list[b]
        c2 = d_list[b]
        if s1 == s2 or c1 == c2:
            fails += 1
            continue
        k1 = s1 * n_companies + c2
        k2 = s2 * n_companies + c1
        if k1 in present or k2 in present:
            fails += 1
            continue
        present.discard(s1 * n_companies + c1)
        present.discard(s2 * n_companies + c2)
        present.add(k1)
        present.add(k2)
        d_list[a] = c2
        d_list[b] = c1
        done += 1
        fails = 0
    dst[:] = d_list
    return done, i, fails


def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


def percolation_counts(indptr, indices, keep, order):
    """Component counts while removing ``order`` one node at a time.

    ``keep`` flags the nodes that are never removed; ``order`` lists every
    other node. ``counts[r]`` is the number of components after the first
    ``r`` removals. Computed by adding nodes back in reverse with
    union-find.
    """
    n = len(indptr) - 1
    ptr = indptr.tolist()
    nbr = indices.tolist()
    present = [bool(x) for x in keep.tolist()]
    parent = list(range(n))
    comps = 0
    for v in range(n):
        if not present[v]:
            continue
        comps += 1
        for j in range(ptr[v], ptr[v + 1]):
            u = nbr[j]
            if u < v and present[u]:
                ru = _find(parent, u)
                rv = _find(parent, v)
                if ru != rv:
                    parent[ru] = rv
                    comps -= 1
    seq = order.tolist()
    r_total = len(seq)
    counts = np.zeros(r_total + 1, dtype=np.int64)
    counts[r_total] = comps
    for r in range(r_total - 1, -1, -1):
        v = seq[r]
        present[v] = True
        comps += 1
        for j in range(ptr[v], ptr[v + 1]):
            u = nbr[j]
            if present[u]:
                ru = _find(parent, u)
                rv = _find(parent, v)
                if ru != rv:
                    parent[ru] = rv
                    comps -= 1
        counts[r] = comps
    return counts
