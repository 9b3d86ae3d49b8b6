"""Time the compiled kernels against their pure-Python twins.

    python benchmarks/bench_kernels.py --n 3000 --repeat 3

Both backends run on the same inputs and their outputs are checked for
equality before any timing is reported.
"""

import argparse
import time

import numpy as np

from ownet import _kernels
from ownet.graph import TypedProjection


def random_graph(n, mean_degree, seed):
    rng = np.random.default_rng(seed)
    m = int(n * mean_degree / 2)
    u, v = rng.integers(0, n, (2, m))
    keep = u != v
    edges = sorted({(min(a, b), max(a, b)) for a, b in zip(u[keep].tolist(), v[keep].tolist())})
    return TypedProjection.from_edge_list(n, edges)


def cases(g, seed):
    rng = np.random.default_rng(seed)
    sources = np.arange(min(g.n, 400), dtype=np.int64)
    keep = (rng.random(g.n) < 0.5).astype(np.uint8)
    order = rng.permutation(np.flatnonzero(keep == 0)).astype(np.int64)
    n_s, n_c = g.n, max(g.n // 2, 2)
    key = np.unique(rng.integers(0, n_s, 4 * g.n) * n_c + rng.integers(0, n_c, 4 * g.n))
    src, dst = key // n_c, key % n_c
    picks = rng.integers(0, len(key), (2, 20 * len(key)))
    return {
        "brandes (400 sources)": lambda k: k.brandes(g.indptr, g.indices, sources),
        "distance_stats (400 sources)": lambda k: k.distance_stats(g.indptr, g.indices, sources),
        "local_clustering": lambda k: k.local_clustering(g.indptr, g.indices),
        "percolation_counts": lambda k: k.percolation_counts(g.indptr, g.indices, keep, order),
        "rewire_swaps (10x|E|)": lambda k: (
            lambda d: (k.rewire_swaps(src, d, n_c, picks[0], picks[1], 10 * len(key), 10**6, 0), d)
        )(dst.copy()),
    }


def same(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    if isinstance(a, (tuple, list)):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    return a == b


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3000, help="nodes in the random test graph")
    ap.add_argument("--mean-degree", type=float, default=6.0)
    ap.add_argument("--repeat", type=int, default=3, help="runs per kernel; the best is reported")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _kernels.compiled is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e .` first")
    g = random_graph(args.n, args.mean_degree, args.seed)
    print(f"graph: n={g.n} m={g.m}")
    print(f"{'kernel':32s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for name, run in cases(g, args.seed).items():
        if not same(run(_kernels.pure), run(_kernels.compiled)):
            raise SystemExit(f"{name}: backends disagree")
        tp = best_of(lambda: run(_kernels.pure), args.repeat)
        tc = best_of(lambda: run(_kernels.compiled), args.repeat)
        print(f"{name:32s} {tp:10.4f} {tc:10.4f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
