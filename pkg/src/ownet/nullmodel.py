"""Degree-preserving randomisation of bipartite ownership networks.

Swaps only ever exchange the company endpoints of two investment edges, so
every edge stays shareholder -> company and both degree sequences are kept
exactly. Projection degrees are *not* preserved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from . import _kernels
from ._parallel import run_tasks
from .graph import BipartiteNetwork, TypedProjection, project

DEFAULT_SWAPS_PER_EDGE = 10.0
_MAX_BATCH = 1 << 21


class SwapBudgetError(RuntimeError):
    """A swap could not be completed within the attempt budget.

    ``network`` holds the state reached before giving up.
    """

    def __init__(self, done: int, requested: int, network: BipartiteNetwork):
        super().__init__(
            f"gave up after {done}/{requested} successful swaps: "
            "attempt budget for a single swap exhausted"
        )
        self.done = done
        self.requested = requested
        self.network = network


@dataclass(frozen=True)
class SwapPlan:
    n_swaps: int
    seed: int = 0
    max_attempts_per_swap: int = 1000

    def __post_init__(self):
        if self.n_swaps < 0:
            raise ValueError("n_swaps must be >= 0")
        if self.max_attempts_per_swap < 1:
            raise ValueError("max_attempts_per_swap must be >= 1")


def derive_seed(master: int, index: int) -> int:
    """Independent 64-bit seed for realisation ``index`` of a run seeded with ``master``."""
    state = np.random.SeedSequence(master, spawn_key=(index,)).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def rewire(b: BipartiteNetwork, plan: SwapPlan) -> BipartiteNetwork:
    """Perform ``plan.n_swaps`` successful double-edge swaps.

    Two edges (s1, c1), (s2, c2) are drawn uniformly and replaced by
    (s1, c2), (s2, c1). The attempt is rejected when s1 == s2, c1 == c2 or
    either new edge already exists; rejected attempts do not count.
    """
    if plan.n_swaps == 0:
        return b
    m = b.n_edges
    if m < 2:
        raise ValueError("rewiring needs at least two edges")
    rng = np.random.default_rng(np.random.SeedSequence(plan.seed))
    src = np.array(b.edge_shareholder, dtype=np.int64)
    dst = np.array(b.edge_company, dtype=np.int64)
    done = 0
    fails = 0
    while done < plan.n_swaps:
        remaining = plan.n_swaps - done
        batch = min(_MAX_BATCH, max(1024, remaining + remaining // 4))
        picks_a = rng.integers(0, m, size=batch, dtype=np.int64)
        picks_b = rng.integers(0, m, size=batch, dtype=np.int64)
        got, _, fails = _kernels.rewire_swaps(
            src, dst, b.n_companies, picks_a, picks_b, remaining, plan.max_attempts_per_swap, fails
        )
        done += got
        if fails >= plan.max_attempts_per_swap:
            raise SwapBudgetError(done, plan.n_swaps, b.with_company_edges(dst))
    return b.with_company_edges(dst)


@dataclass(frozen=True)
class NullEnsemble:
    networks: tuple[BipartiteNetwork, ...]
    realizations: tuple[TypedProjection, ...]
    seeds: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.realizations)


def _one_realization(b, n_swaps, seed, max_attempts, fn):
    r = rewire(b, SwapPlan(n_swaps, seed, max_attempts))
    p = project(r)
    return fn(r, p) if fn is not None else (r, p)


def ensemble_map(
    b: BipartiteNetwork,
    size: int,
    fn: Callable[[BipartiteNetwork, TypedProjection], object] | None,
    swaps_per_edge: float = DEFAULT_SWAPS_PER_EDGE,
    seed: int = 0,
    jobs: int | None = None,
    max_attempts_per_swap: int = 1000,
) -> list:
    """Rewire, project and apply ``fn(network, projection)`` for each realisation.

    ``fn`` must be picklable when ``jobs > 1``. Results are ordered by
    realisation index.
    """
    if size < 1:
        raise ValueError("ensemble size must be >= 1")
    if swaps_per_edge < 0:
        raise ValueError("swaps_per_edge must be >= 0")
    n_swaps = math.ceil(swaps_per_edge * b.n_edges)
    tasks = [(b, n_swaps, derive_seed(seed, i), max_attempts_per_swap, fn) for i in range(size)]
    return run_tasks(_one_realization, tasks, jobs)


def ensemble(
    b: BipartiteNetwork,
    size: int,
    swaps_per_edge: float = DEFAULT_SWAPS_PER_EDGE,
    seed: int = 0,
    jobs: int | None = None,
    max_attempts_per_swap: int = 1000,
) -> NullEnsemble:
    results = ensemble_map(b, size, None, swaps_per_edge, seed, jobs, max_attempts_per_swap)
    return NullEnsemble(
        tuple(r for r, _ in results),
        tuple(p for _, p in results),
        tuple(derive_seed(seed, i) for i in range(size)),
    )


@dataclass(frozen=True)
class Box:
    q1: float
    median: float
    q3: float
    lo_whisker: float
    hi_whisker: float

    def contains(self, x: float) -> bool:
        return self.lo_whisker <= x <= self.hi_whisker


def box_stats(values) -> Box:
    """Quartiles and 1.5 IQR whiskers (clamped to the most extreme data inside them)."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    if len(v) == 0:
        raise ValueError("no values to summarise")
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    iqr = q3 - q1
    lo = v[v >= q1 - 1.5 * iqr].min()
    hi = v[v <= q3 + 1.5 * iqr].max()
    return Box(float(q1), float(med), float(q3), float(lo), float(hi))


@dataclass(frozen=True)
class NullBoxRow:
    type_id: int
    metric: str
    real_value: float
    box: Box

    def as_row(self) -> tuple:
        b = self.box
        return (self.type_id, self.metric, self.real_value, b.q1, b.median, b.q3, b.lo_whisker, b.hi_whisker)


NULL_BOX_HEADER = ("type_id", "metric", "real_value", "q1", "median", "q3", "lo_whisker", "hi_whisker")


def summarize_values(
    per_realization: list[Mapping[int, float]],
    real: Mapping[int, float],
    metric: str,
) -> list[NullBoxRow]:
    """Box per type from per-realisation ``{type_id: value}`` maps.

    Types missing from a realisation are skipped for that realisation; types
    never seen in the nulls get no row.
    """
    types = sorted({t for d in per_realization for t in d} | set(real))
    rows = []
    for t in types:
        vals = [d[t] for d in per_realization if t in d and not math.isnan(d[t])]
        if not vals:
            continue
        rows.append(NullBoxRow(int(t), metric, float(real.get(t, math.nan)), box_stats(vals)))
    return rows


def null_summary(
    e: NullEnsemble,
    metric: Callable[[TypedProjection], Mapping[int, float]],
    real: TypedProjection | None = None,
    name: str | None = None,
) -> list[NullBoxRow]:
    """Per-type box plots of ``metric`` over the ensemble, with the real value alongside."""
    if e.size == 0:
        raise ValueError("empty ensemble")
    values = [metric(p) for p in e.realizations]
    real_values = metric(real) if real is not None else {}
    return summarize_values(values, real_values, name or getattr(metric, "__name__", "metric"))
