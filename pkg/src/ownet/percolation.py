"""Typed random node removal from the largest connected component."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._parallel import run_tasks
from .graph import TypedProjection, components
from .nullmodel import derive_seed
from .types import OwnerType

DEFAULT_REALIZATIONS = 100


@dataclass(frozen=True)
class PercolationRun:
    """Component counts of G(r) after ``r`` removals of ``target_type`` nodes.

    ``mean[r]`` / ``std[r]`` summarise ``curves[:, r]`` over realisations
    (population standard deviation). ``orders`` holds each realisation's
    removal sequence as LCC-local node indices. Isolated nodes count as
    components; removing every node leaves 0 components.
    """

    target_type: OwnerType
    n_target: int
    realizations: int
    seed: int
    orders: np.ndarray
    curves: np.ndarray
    mean: np.ndarray
    std: np.ndarray

    @property
    def empty(self) -> bool:
        return self.n_target == 0


def _realization(indptr, indices, keep, targets, seed):
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    order = rng.permutation(targets)
    return order, _kernels.percolation_counts(indptr, indices, keep, order)


def percolate_graph(
    g: TypedProjection,
    target_type: OwnerType | int,
    realizations: int = DEFAULT_REALIZATIONS,
    seed: int = 0,
    jobs: int | None = None,
) -> PercolationRun:
    """Removal experiment on ``g`` as given (no LCC extraction)."""
    target_type = OwnerType(int(target_type))
    if realizations < 1:
        raise ValueError("realizations must be >= 1")
    targets = np.flatnonzero(g.types == int(target_type)).astype(np.int64)
    if len(targets) == 0:
        z = np.zeros((0, 0), dtype=np.int64)
        return PercolationRun(target_type, 0, realizations, seed, z, z, np.zeros(0), np.zeros(0))
    keep = (g.types != int(target_type)).astype(np.uint8)
    tasks = [(g.indptr, g.indices, keep, targets, derive_seed(seed, i)) for i in range(realizations)]
    results = run_tasks(_realization, tasks, jobs)
    orders = np.stack([o for o, _ in results])
    curves = np.stack([c for _, c in results])
    return PercolationRun(
        target_type, len(targets), realizations, seed, orders, curves,
        curves.mean(axis=0), curves.std(axis=0),
    )


def percolate(
    p: TypedProjection,
    target_type: OwnerType | int,
    realizations: int = DEFAULT_REALIZATIONS,
    seed: int = 0,
    jobs: int | None = None,
) -> PercolationRun:
    """Remove ``target_type`` nodes from the LCC one at a time, uniformly at random.

    Returns an empty run when the LCC holds no node of that type.
    """
    comp = components(p)
    lcc = p.subgraph(comp.lcc_nodes()) if p.n else p
    return percolate_graph(lcc, target_type, realizations, seed, jobs)


def percolation_slope(run: PercolationRun, r_range: tuple[int, int] | None = None) -> float:
    """Least-squares slope of the mean component count against ``r`` over ``r_range`` (inclusive)."""
    if run.empty:
        raise ValueError("empty percolation run")
    lo, hi = r_range if r_range is not None else (0, run.n_target)
    if lo < 0 or hi > run.n_target:
        raise ValueError(f"r_range {lo, hi} outside 0..{run.n_target}")
    if hi - lo < 1:
        raise ValueError("r_range must span at least 2 points")
    r = np.arange(lo, hi + 1, dtype=np.float64)
    slope, _ = np.polyfit(r, run.mean[lo:hi + 1], 1)
    return float(slope)
