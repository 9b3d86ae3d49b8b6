"""Per-node and per-type measurements on a shareholder projection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from . import _kernels
from ._parallel import chunked, run_tasks
from .graph import ComponentDecomposition, TypedProjection, components, distance_stats, twin_classes
from .types import N_TYPES


class FitRefused(ValueError):
    """Not enough usable data for a regression."""


# --------------------------------------------------------------------------
# degree distributions

class LogBin(NamedTuple):
    lo: float
    hi: float
    center: float
    count: int
    density: float


class PowerLawFit(NamedTuple):
    gamma: float
    intercept: float
    k_lo: float
    k_hi: float
    r_squared: float
    n_bins: int


@dataclass(frozen=True)
class DegreeDistribution:
    raw_counts: dict[int, int]
    bin_ratio: float
    log_bins: tuple[LogBin, ...]
    fit: PowerLawFit | None
    fit_error: str | None = None


def log_bins(values: Sequence[int], bin_ratio: float = 2.0) -> list[LogBin]:
    """Logarithmic bins over positive integer values.

    Bin edges are ``k_min * bin_ratio**i``. A bin's width is the number of
    integers it covers and its centre is the geometric mean of its first and
    last integer; bins that cover no integer are skipped.
    """
    if not bin_ratio > 1:
        raise ValueError("bin_ratio must exceed 1")
    v = np.asarray(values, dtype=np.int64)
    v = v[v > 0]
    if len(v) == 0:
        return []
    k_min, k_max = int(v.min()), int(v.max())
    counts = np.bincount(v)
    out = []
    i = 0
    while True:
        lo = k_min * bin_ratio**i
        hi = k_min * bin_ratio ** (i + 1)
        i += 1
        if lo > k_max:
            break
        first, last = math.ceil(lo), math.ceil(hi) - 1
        if last < first:
            continue
        width = last - first + 1
        c = int(counts[first:min(last, k_max) + 1].sum())
        out.append(LogBin(lo, hi, math.sqrt(first * last), c, c / width))
    return out


def fit_power_law(bins: Sequence[LogBin], fit_range: tuple[float, float] | None = None) -> PowerLawFit:
    """Least-squares line through (ln centre, ln density) of the non-empty bins.

    ``fit_range`` keeps bins whose centre lies in ``[k_lo, k_hi]``.
    """
    pts = [b for b in bins if b.count > 0]
    if fit_range is not None:
        k_lo, k_hi = fit_range
        pts = [b for b in pts if k_lo <= b.center <= k_hi]
    if len(pts) < 3:
        raise FitRefused(f"need at least 3 non-empty bins in range, have {len(pts)}")
    x = np.log([b.center for b in pts])
    y = np.log([b.density for b in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(float(-slope), float(intercept), pts[0].center, pts[-1].center, r2, len(pts))


def distribution(values: Sequence[int], bin_ratio: float = 2.0, fit_range=None) -> DegreeDistribution:
    v = np.asarray(values, dtype=np.int64)
    raw = {int(k): int(c) for k, c in enumerate(np.bincount(v)) if c} if len(v) else {}
    bins = log_bins(v, bin_ratio)
    try:
        fit, err = fit_power_law(bins, fit_range), None
    except FitRefused as exc:
        fit, err = None, str(exc)
    return DegreeDistribution(raw, bin_ratio, tuple(bins), fit, err)


def degree_distribution(p: TypedProjection, bin_ratio: float = 2.0, fit_range=None) -> DegreeDistribution:
    return distribution(p.degrees, bin_ratio, fit_range)


# --------------------------------------------------------------------------
# centrality

def per_type_mean(values: np.ndarray, types: np.ndarray) -> dict[int, float]:
    """Mean of ``values`` per type id, ignoring NaNs; types without data are left out."""
    out = {}
    for t in np.unique(types).tolist():
        sel = values[(types == t) & ~np.isnan(values)]
        if len(sel):
            out[int(t)] = float(sel.mean())
    return out


@dataclass(frozen=True)
class CentralityTable:
    """Centralities for ``nodes`` (indices into the projection they came from)."""

    nodes: np.ndarray
    types: np.ndarray
    degrees: np.ndarray
    betweenness: np.ndarray | None = None
    closeness: np.ndarray | None = None

    @property
    def farness(self) -> np.ndarray:
        if self.closeness is None:
            raise ValueError("closeness was not computed")
        with np.errstate(divide="ignore"):
            return np.where(np.isnan(self.closeness), np.nan, 1.0 / self.closeness)

    def type_means(self, which: str) -> dict[int, float]:
        values = {
            "betweenness": self.betweenness,
            "closeness": self.closeness,
            "farness": self.farness if which == "farness" else None,
            "degree": self.degrees.astype(np.float64),
        }[which]
        if values is None:
            raise ValueError(f"{which} was not computed")
        return per_type_mean(values, self.types)


def _scope(p: TypedProjection, scope, comp):
    if scope is None or scope == "lcc":
        comp = comp if comp is not None else components(p)
        nodes = comp.lcc_nodes()
    elif scope == "all":
        nodes = np.arange(p.n)
    else:
        nodes = np.unique(np.asarray(scope, dtype=np.int64))
    sub = p if len(nodes) == p.n else p.subgraph(nodes)
    return nodes, sub


def _brandes_chunk(indptr, indices, sources, weights):
    return _kernels.brandes(indptr, indices, sources, weights)


def _closeness_from(sub: TypedProjection, dist_sum: np.ndarray) -> np.ndarray:
    comp = components(sub)
    size = comp.sizes[comp.labels].astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = (size - 1.0) / dist_sum
    c[size < 2] = np.nan
    return c


def centrality(
    p: TypedProjection,
    scope="lcc",
    comp: ComponentDecomposition | None = None,
    jobs: int | None = None,
    want_betweenness: bool = True,
) -> CentralityTable:
    """Betweenness and closeness over ``scope`` (default: the LCC).

    Betweenness is unnormalised and counts unordered source/target pairs,
    endpoints excluded. Closeness is ``(n - 1) / sum of distances`` with
    ``n`` the size of the node's own component; NaN for isolated nodes.
    """
    nodes, sub = _scope(p, scope, comp)
    if want_betweenness:
        # one pass per class of twins, weighted by its size
        tw = twin_classes(sub)
        spans = chunked(len(tw.reps))
        tasks = [(sub.indptr, sub.indices, tw.reps[lo:hi], tw.sizes[lo:hi].astype(np.float64)) for lo, hi in spans]
        parts = run_tasks(_brandes_chunk, tasks, jobs)
        dependency = np.zeros(sub.n, dtype=np.float64)
        dist_sum = np.zeros(len(tw.reps), dtype=np.int64)
        for (lo, hi), (dep, ds, _) in zip(spans, parts):
            dependency += dep
            dist_sum[lo:hi] = ds[tw.reps[lo:hi]]
        dist_sum = dist_sum[tw.owner]
        between = dependency / 2.0
    else:
        dist_sum, _ = distance_stats(sub, jobs)
        between = None
    return CentralityTable(nodes, sub.types.copy(), sub.degrees.copy(), between, _closeness_from(sub, dist_sum))


def betweenness(p: TypedProjection, scope="lcc", jobs: int | None = None) -> CentralityTable:
    return centrality(p, scope, jobs=jobs)


def closeness(p: TypedProjection, scope="lcc", jobs: int | None = None) -> CentralityTable:
    return centrality(p, scope, jobs=jobs, want_betweenness=False)


# --------------------------------------------------------------------------
# branching-ratio model of farness

@dataclass(frozen=True)
class BranchingFit:
    slope: float
    intercept: float
    zbar: float                 # exp(1 / slope): effective branching ratio
    theoretical_zbar: float     # <k^2>/<k> - 1 on the LCC
    r_squared: float
    n_lcc: int
    points: tuple[tuple[int, float, float], ...]   # (type_id, ln(N_LCC / mean k), mean farness)

    @property
    def theoretical_slope(self) -> float:
        return 1.0 / math.log(self.theoretical_zbar) if self.theoretical_zbar > 1 else math.nan


def theoretical_branching(degrees: np.ndarray) -> float:
    k = np.asarray(degrees, dtype=np.float64)
    return float((k**2).mean() / k.mean() - 1.0)


def branching_fit(table: CentralityTable, min_type_count: int = 1) -> BranchingFit:
    """Regress per-type mean farness on ln(N_LCC / per-type mean degree).

    ``table`` must hold closeness for one connected component (the LCC).
    Types with fewer than ``min_type_count`` nodes are ignored.
    """
    if table.closeness is None:
        raise ValueError("closeness was not computed")
    n_lcc = len(table.nodes)
    far = table.farness
    pts = []
    for t in np.unique(table.types).tolist():
        sel = table.types == t
        if sel.sum() < max(min_type_count, 1):
            continue
        kbar = table.degrees[sel].mean()
        fbar = far[sel].mean()
        if kbar > 0 and not math.isnan(fbar):
            pts.append((int(t), math.log(n_lcc / kbar), float(fbar)))
    if len(pts) < 3:
        raise FitRefused(f"need at least 3 types in the LCC, have {len(pts)}")
    x = np.array([q[1] for q in pts])
    y = np.array([q[2] for q in pts])
    if np.ptp(x) <= 1e-12 * max(1.0, abs(x).max()):
        raise FitRefused("per-type mean degrees are identical; regressor has no variance")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    if slope > 0:
        # a near-flat fit means an unbounded branching ratio
        zbar = math.exp(1.0 / slope) if 1.0 / slope < 700.0 else math.inf
    else:
        zbar = math.nan
    return BranchingFit(
        float(slope), float(intercept), zbar, theoretical_branching(table.degrees), r2, n_lcc, tuple(pts)
    )


def format_slopes(data: float, null: float | None, theory: float | None) -> str:
    parts = [f"data {data:.2f}"]
    if null is not None:
        parts.append(f"null {null:.2f}")
    if theory is not None:
        parts.append(f"theory {theory:.2f}")
    return ", ".join(parts)


# --------------------------------------------------------------------------
# type mixing

@dataclass(frozen=True)
class MixingMatrix:
    cov: np.ndarray          # 13 x 13, row/col i is type id i + 1
    r: float
    pair_counts: np.ndarray  # 13 x 13 symmetric edge counts between types
    fractions: np.ndarray    # e[tau, sigma]: fraction of edge ends, sums to 1


def _type_indicator(p: TypedProjection):
    from scipy import sparse

    return sparse.csr_matrix(
        (np.ones(p.n), (np.arange(p.n), p.types.astype(np.int64) - 1)), shape=(p.n, N_TYPES)
    )


def assortativity(p: TypedProjection) -> MixingMatrix:
    """Type covariance matrix and the type assortativity coefficient ``r``.

    With ``e`` the fraction of edge ends joining each type pair and ``a``
    the degree share of each type, ``cov = e - a a^T`` and
    ``r = trace(cov) / (1 - sum a^2)``. ``r`` is NaN if one type holds
    every edge end.
    """
    if p.m < 1:
        raise ValueError("assortativity needs at least one edge")
    t = _type_indicator(p)
    ends = np.asarray((t.T @ p.adjacency().astype(np.float64) @ t).todense())
    two_m = 2.0 * p.m
    e = ends / two_m
    a = (t.T @ p.degrees.astype(np.float64)) / two_m
    cov = e - np.outer(a, a)
    denom = 1.0 - float((a**2).sum())
    r = float(np.trace(cov) / denom) if denom > 1e-15 else math.nan
    counts = ends.copy()
    np.fill_diagonal(counts, np.diag(ends) / 2.0)
    return MixingMatrix(cov, r, counts.round().astype(np.int64), e)


# --------------------------------------------------------------------------
# neighbour diversity

@dataclass(frozen=True)
class DiversityTable:
    nodes: np.ndarray            # nodes with k > 0
    types: np.ndarray
    diversity: np.ndarray
    type_degree: np.ndarray      # (len(nodes), 13) neighbour counts per type
    d_null: float

    def type_means(self) -> dict[int, float]:
        return per_type_mean(self.diversity, self.types)


def entropy(counts) -> float:
    c = np.asarray(counts, dtype=np.float64)
    c = c[c > 0]
    if len(c) == 0:
        return 0.0
    q = c / c.sum()
    return float(-(q * np.log(q)).sum())


def diversity(p: TypedProjection) -> DiversityTable:
    """Entropy of each node's neighbour-type mix, plus the census entropy ``d_null``."""
    kt = np.asarray((p.adjacency().astype(np.float64) @ _type_indicator(p)).todense())
    k = p.degrees
    nodes = np.flatnonzero(k > 0)
    kt = kt[nodes]
    q = kt / k[nodes, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(q > 0, q * np.log(q), 0.0)
    d = -terms.sum(axis=1)
    d[np.abs(d) < 1e-15] = 0.0
    census = p.type_counts()[1:]
    return DiversityTable(nodes, p.types[nodes], d, kt.round().astype(np.int64), entropy(census))
