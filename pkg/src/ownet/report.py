"""Analyses behind the command-line front end and the files they write.

Every CSV starts with ``#`` provenance lines (seed, config hash, input
checksum) followed by a header row. JSON payloads carry the same data under
a ``provenance`` key. Nothing time-dependent is written, so identical
configs give identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .community import (
    CommunityPartition,
    compare_methods,
    composition,
    infomap_optimize,
    louvain,
    size_distribution,
)
from .graph import (
    BipartiteNetwork,
    TypedProjection,
    clustering_coefficient,
    components,
    largest_component,
    project,
    shortest_path_stats,
)
from .metrics import (
    DegreeDistribution,
    FitRefused,
    assortativity,
    branching_fit,
    centrality,
    degree_distribution,
    diversity,
    format_slopes,
    per_type_mean,
)
from .nullmodel import NULL_BOX_HEADER, SwapPlan, derive_seed, ensemble_map, rewire, summarize_values
from .percolation import percolate, percolation_slope
from .types import N_TYPES, OwnerType

log = logging.getLogger(__name__)

PERCOLATION_HEADER = ("type_id", "r", "mean_components", "std_components")
NODE_HEADER = ("node_id", "type_id", "degree", "betweenness", "closeness", "diversity")
PARTITION_HEADER = ("node_id", "community_id", "method", "seed")
BINS_HEADER = ("lo", "hi", "center", "count", "density")
COMPARISON_HEADER = (
    "rank", "community_id", "size", "n_types", "contained_pct",
    "partner_id", "partner_size", "partner_n_types", "partner_rank", "identical",
)


# --------------------------------------------------------------------------
# provenance and writers

def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return "sha256:" + hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class Provenance:
    seed: int
    config: dict
    input_checksum: str | None

    @property
    def config_hash(self) -> str:
        return config_hash(self.config)

    def comment_lines(self) -> list[str]:
        return [
            f"# ownet {__version__}",
            f"# seed={self.seed}",
            f"# config_hash={self.config_hash}",
            f"# input_checksum={self.input_checksum or 'none'}",
        ]

    def as_dict(self) -> dict:
        return {
            "version": __version__,
            "seed": self.seed,
            "config_hash": self.config_hash,
            "config": self.config,
            "input_checksum": self.input_checksum,
        }


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return "nan" if math.isnan(x) else repr(x)
    return str(x)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence], prov: Provenance) -> Path:
    buf = io.StringIO()
    for line in prov.comment_lines():
        buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    path.write_bytes(buf.getvalue().encode("utf-8"))
    return path


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return None if math.isnan(x) or math.isinf(x) else x
    return x


def write_json(path: Path, payload: dict, prov: Provenance) -> Path:
    body = dict(payload)
    body["provenance"] = prov.as_dict()
    text = json.dumps(_jsonable(body), sort_keys=True, indent=2, allow_nan=False)
    path.write_bytes((text + "\n").encode("utf-8"))
    return path


# --------------------------------------------------------------------------
# summary

def _fit_dict(dist: DegreeDistribution) -> dict:
    if dist.fit is None:
        return {"gamma": None, "error": dist.fit_error}
    f = dist.fit
    return {
        "gamma": f.gamma, "fit_range": [f.k_lo, f.k_hi], "r_squared": f.r_squared,
        "n_bins": f.n_bins, "bin_ratio": dist.bin_ratio,
    }


def bins_rows(dist: DegreeDistribution):
    return [(b.lo, b.hi, b.center, b.count, b.density) for b in dist.log_bins]


def summary_fields(
    b: BipartiteNetwork,
    p: TypedProjection,
    bin_ratio: float = 2.0,
    fit_range=None,
    jobs: int | None = None,
) -> tuple[dict, DegreeDistribution]:
    """Headline numbers for a dataset: counts, degree exponent and LCC statistics."""
    comp = components(p)
    lcc = largest_component(p, comp)
    dist = degree_distribution(p, bin_ratio, fit_range)
    paths = shortest_path_stats(p, comp, jobs)
    census = p.type_counts()
    fields = {
        "n_shareholders": b.n_shareholders,
        "n_companies": b.n_companies,
        "n_ownership_edges": b.n_edges,
        "n_projected_edges": p.m,
        "n_components": comp.n_components,
        "degree_fit": _fit_dict(dist),
        "lcc_nodes": comp.n_lcc,
        "lcc_edges": lcc.m,
        "lcc_clustering": clustering_coefficient(lcc) if lcc.n else None,
        "lcc_global_clustering": clustering_coefficient(lcc, variant="global") if lcc.n else None,
        "lcc_diameter": paths.diameter if paths else None,
        "lcc_average_shortest_path": paths.average_shortest_path if paths else None,
        "type_census": {OwnerType(t).name: int(census[t]) for t in range(1, N_TYPES + 1)},
    }
    return fields, dist


# --------------------------------------------------------------------------
# per-node metrics and null comparisons

def _safe_branching(table, min_type_count: int):
    try:
        return branching_fit(table, min_type_count)
    except (FitRefused, ValueError):
        return None


def null_metrics(network: BipartiteNetwork, p: TypedProjection, min_type_count: int = 1) -> dict:
    """Per-type means and scalars for one null realisation (runs single-threaded)."""
    table = centrality(p, jobs=1)
    div = diversity(p)
    fit = _safe_branching(table, min_type_count)
    try:
        r = assortativity(p).r
    except ValueError:
        r = math.nan
    return {
        "betweenness": table.type_means("betweenness"),
        "closeness": table.type_means("closeness"),
        "diversity": div.type_means(),
        "assortativity": r,
        "branching_slope": fit.slope if fit else math.nan,
        "lcc_nodes": len(table.nodes),
    }


def null_community_sizes(network: BipartiteNetwork, p: TypedProjection, seed: int = 0) -> dict:
    out = {}
    for name, fn in (("Louvain", louvain), ("MapEquation", infomap_optimize)):
        if p.m == 0:
            out[name] = 1
            continue
        out[name] = int(fn(p, seed).sizes.max())
    return out


@dataclass
class AnalysisResult:
    files: list[Path] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    failed: dict = field(default_factory=dict)


def node_rows(p: TypedProjection, table, div) -> list[tuple]:
    n = p.n
    bet = np.full(n, np.nan)
    clo = np.full(n, np.nan)
    if table is not None:
        if table.betweenness is not None:
            bet[table.nodes] = table.betweenness
        clo[table.nodes] = table.closeness
    d = np.full(n, np.nan)
    if div is not None:
        d[div.nodes] = div.diversity
    deg = p.degrees
    return [
        (p.node_ids[i], int(p.types[i]), int(deg[i]), bet[i], clo[i], d[i]) for i in range(n)
    ]


def type_metric_rows(p: TypedProjection, table, div) -> list[tuple]:
    lcc_types = table.types if table is not None else np.zeros(0, dtype=np.int8)
    means = {
        "degree": per_type_mean(p.degrees.astype(np.float64), p.types),
        "betweenness": table.type_means("betweenness") if table is not None and table.betweenness is not None else {},
        "closeness": table.type_means("closeness") if table is not None else {},
        "farness": table.type_means("farness") if table is not None else {},
        "diversity": div.type_means() if div is not None else {},
    }
    counts = np.bincount(p.types.astype(np.int64), minlength=N_TYPES + 1)
    lcc_counts = np.bincount(lcc_types.astype(np.int64), minlength=N_TYPES + 1)
    rows = []
    for t in range(1, N_TYPES + 1):
        if counts[t] == 0:
            continue
        rows.append((
            t, OwnerType(t).name, int(counts[t]), int(lcc_counts[t]),
            *(means[k].get(t, math.nan) for k in ("degree", "betweenness", "closeness", "farness", "diversity")),
        ))
    return rows


TYPE_METRIC_HEADER = (
    "type_id", "type_name", "n_nodes", "n_lcc", "mean_degree",
    "mean_betweenness", "mean_closeness", "mean_farness", "mean_diversity",
)


def mixing_rows(mix) -> list[tuple]:
    rows = []
    for a in range(N_TYPES):
        for c in range(N_TYPES):
            if mix.pair_counts[a, c] or mix.fractions[a, c]:
                rows.append((a + 1, c + 1, int(mix.pair_counts[a, c]), mix.fractions[a, c], mix.cov[a, c]))
    return rows


MIXING_HEADER = ("type_a", "type_b", "edge_count", "fraction", "cov")


def percolation_rows(runs) -> list[tuple]:
    rows = []
    for run in runs:
        for r in range(len(run.mean)):
            rows.append((int(run.target_type), r, run.mean[r], run.std[r]))
    return rows


def partition_rows(p: TypedProjection, parts: Sequence[CommunityPartition]) -> list[tuple]:
    rows = []
    for c in parts:
        rows.extend((p.node_ids[i], int(c.assignment[i]), c.method, c.seed) for i in range(p.n))
    return rows


def community_block(c: CommunityPartition, bin_ratio: float, fit_range) -> tuple[dict, list[tuple]]:
    s = size_distribution(c, bin_ratio, fit_range)
    info = {
        "n_communities": s.n_communities,
        "avg_size": s.avg_size,
        "max_size": s.max_size,
        "avg_size_excluding_singletons": s.avg_size_excluding_singletons,
        "quality": c.quality,
        "size_fit": _fit_dict(s.distribution),
    }
    bins = [(c.method, *row) for row in bins_rows(s.distribution)]
    return info, bins


def composition_rows(c: CommunityPartition, p: TypedProjection, focal: Sequence[int], min_sizes: Sequence[int]):
    rows = []
    for t in focal:
        for ms in min_sizes:
            h = composition(c, p, t, ms)
            edges = h.bin_edges
            for i, n in enumerate(h.counts.tolist()):
                rows.append((c.method, int(t), ms, edges[i], edges[i + 1], n))
    return rows


COMPOSITION_HEADER = ("method", "focal_type", "min_size", "bin_lo", "bin_hi", "n_communities")


def comparison_rows(cmp) -> list[tuple]:
    return [tuple(r) for r in cmp.rows]


# --------------------------------------------------------------------------
# orchestration

@dataclass(frozen=True)
class AnalysisPlan:
    seed: int = 0
    realizations: int = 100
    swaps_per_edge: float = 10.0
    bin_ratio: float = 2.0
    fit_range: tuple[float, float] | None = None
    size_fit_range: tuple[float, float] | None = None
    percolation_types: tuple[int, ...] | None = None
    focal_types: tuple[int, ...] = (int(OwnerType.Families), int(OwnerType.Corporates))
    min_community_size: int = 4
    community_nulls: int = 3
    min_type_count: int = 1
    jobs: int | None = None


def _attempt(result: AnalysisResult, name: str, fn):
    try:
        return fn()
    except Exception as exc:  # noqa: BLE001 - isolate one analysis from the rest
        log.error("%s failed: %s", name, exc)
        result.failed[name] = f"{type(exc).__name__}: {exc}"
        return None


def run_metrics(b, p, plan: AnalysisPlan, out: Path, prov: Provenance, result: AnalysisResult):
    """Centralities, diversity, mixing, branching fit and their null comparisons."""
    table = _attempt(result, "metrics.centrality", lambda: centrality(p, jobs=plan.jobs))
    div = _attempt(result, "metrics.diversity", lambda: diversity(p))
    mix = _attempt(result, "metrics.assortativity", lambda: assortativity(p))
    fit = _attempt(result, "metrics.branching", lambda: branching_fit(table, plan.min_type_count)) if table else None

    result.files.append(write_csv(out / "nodes.csv", NODE_HEADER, node_rows(p, table, div), prov))
    result.files.append(write_csv(out / "type_metrics.csv", TYPE_METRIC_HEADER, type_metric_rows(p, table, div), prov))
    if mix is not None:
        result.files.append(write_csv(out / "mixing.csv", MIXING_HEADER, mixing_rows(mix), prov))
        result.summary["assortativity"] = {"r": mix.r}
    if div is not None:
        result.summary["diversity"] = {"d_null": div.d_null, "type_means": div.type_means()}
    if fit is not None:
        result.files.append(write_csv(
            out / "branching.csv", ("type_id", "ln_n_over_mean_degree", "mean_farness"), fit.points, prov
        ))
        result.summary["branching"] = {
            "slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared,
            "zbar": fit.zbar, "theoretical_zbar": fit.theoretical_zbar,
            "theoretical_slope": fit.theoretical_slope,
        }

    if plan.realizations < 1:
        return
    per = _attempt(result, "metrics.null_ensemble", lambda: ensemble_map(
        b, plan.realizations, partial(null_metrics, min_type_count=plan.min_type_count),
        plan.swaps_per_edge, plan.seed, plan.jobs,
    ))
    if per is None:
        return
    rows = []
    real = {
        "betweenness": table.type_means("betweenness") if table is not None else {},
        "closeness": table.type_means("closeness") if table is not None else {},
        "diversity": div.type_means() if div is not None else {},
    }
    for metric in ("betweenness", "closeness", "diversity"):
        rows.extend(r.as_row() for r in summarize_values([d[metric] for d in per], real[metric], metric))
    result.files.append(write_csv(out / "null_boxes.csv", NULL_BOX_HEADER, rows, prov))
    slopes = [d["branching_slope"] for d in per if not math.isnan(d["branching_slope"])]
    rs = [d["assortativity"] for d in per if not math.isnan(d["assortativity"])]
    null = {
        "realizations": plan.realizations,
        "swaps_per_edge": plan.swaps_per_edge,
        "branching_slope_median": float(np.median(slopes)) if slopes else None,
        "assortativity_median": float(np.median(rs)) if rs else None,
        "lcc_nodes_median": float(np.median([d["lcc_nodes"] for d in per])),
    }
    result.summary["null"] = null
    if fit is not None:
        result.summary["branching"]["slopes_text"] = format_slopes(
            fit.slope, null["branching_slope_median"], fit.theoretical_slope
        )


def run_percolation(p, plan: AnalysisPlan, out: Path, prov: Provenance, result: AnalysisResult):
    def go():
        lcc_types = p.types[components(p).lcc_nodes()] if p.n else p.types
        types = plan.percolation_types or tuple(sorted(set(lcc_types.tolist())))
        runs = [percolate(p, t, plan.realizations or 1, plan.seed, plan.jobs) for t in types]
        runs = [r for r in runs if not r.empty]
        result.files.append(write_csv(out / "percolation.csv", PERCOLATION_HEADER, percolation_rows(runs), prov))
        slopes = {}
        for r in runs:
            try:
                slopes[int(r.target_type)] = percolation_slope(r)
            except ValueError:
                slopes[int(r.target_type)] = None
        result.summary["percolation_slopes"] = slopes

    _attempt(result, "percolation", go)


def run_communities(b, p, plan: AnalysisPlan, out: Path, prov: Provenance, result: AnalysisResult):
    if p.m == 0:
        result.failed["communities"] = "projection has no edges"
        return
    parts = []
    for name, fn in (("louvain", louvain), ("infomap", infomap_optimize)):
        c = _attempt(result, f"communities.{name}", partial(fn, p, plan.seed))
        if c is not None:
            parts.append(c)
    if not parts:
        return
    result.files.append(write_csv(out / "partitions.csv", PARTITION_HEADER, partition_rows(p, parts), prov))
    block, bins, comp_rows = {}, [], []
    for c in parts:
        info, rows = community_block(c, plan.bin_ratio, plan.size_fit_range)
        block[c.method] = info
        bins.extend(rows)
        sizes = c.sizes
        comp_rows.extend(composition_rows(c, p, plan.focal_types, sorted({1, plan.min_community_size})))
        counts = np.bincount(sizes)
        block[c.method]["size_counts"] = {int(s): int(n) for s, n in enumerate(counts) if n}
    result.files.append(write_csv(out / "community_size_bins.csv", ("method", *BINS_HEADER), bins, prov))
    result.files.append(write_csv(out / "composition.csv", COMPOSITION_HEADER, comp_rows, prov))
    if len(parts) == 2:
        cmp = compare_methods(parts[1], parts[0], p)
        result.files.append(write_csv(out / "comparison.csv", COMPARISON_HEADER, comparison_rows(cmp), prov))
        block["comparison"] = {
            "reference": parts[1].method, "other": parts[0].method,
            "exact_match_fraction": cmp.exact_match_fraction,
            "containment_fraction": cmp.containment_fraction,
        }
    if plan.community_nulls > 0 and plan.realizations > 0:
        nulls = _attempt(result, "communities.nulls", lambda: ensemble_map(
            b, plan.community_nulls, partial(null_community_sizes, seed=plan.seed),
            plan.swaps_per_edge, plan.seed, plan.jobs,
        ))
        if nulls is not None:
            block["null_max_size"] = {
                m: [d[m] for d in nulls] for m in ("Louvain", "MapEquation")
            }
    result.summary["communities"] = block


ANALYSES = ("metrics", "percolation", "communities")


def analyze(
    b: BipartiteNetwork, plan: AnalysisPlan, out: Path, prov: Provenance, parts: Sequence[str] = ANALYSES
) -> AnalysisResult:
    """Run the selected analyses and write their tables plus ``analysis.json``.

    A failing analysis is logged and listed under ``failed``; the others
    still run and write their files.
    """
    out.mkdir(parents=True, exist_ok=True)
    result = AnalysisResult()
    p = project(b)
    fields, dist = summary_fields(b, p, plan.bin_ratio, plan.fit_range, plan.jobs)
    result.summary["network"] = fields
    result.files.append(write_csv(out / "degree_bins.csv", BINS_HEADER, bins_rows(dist), prov))
    result.files.append(write_csv(
        out / "degree_counts.csv", ("degree", "count"), sorted(dist.raw_counts.items()), prov
    ))
    if "metrics" in parts:
        run_metrics(b, p, plan, out, prov, result)
    if "percolation" in parts:
        run_percolation(p, plan, out, prov, result)
    if "communities" in parts:
        run_communities(b, p, plan, out, prov, result)
    result.summary["completed"] = sorted(set(parts) - {k.split(".")[0] for k in result.failed})
    result.summary["failed"] = dict(sorted(result.failed.items()))
    result.files.append(write_json(out / "analysis.json", result.summary, prov))
    return result


def nullcheck(b: BipartiteNetwork, plan: AnalysisPlan, out: Path, prov: Provenance) -> AnalysisResult:
    """Rewire once to confirm degree preservation, then box the per-type metrics."""
    out.mkdir(parents=True, exist_ok=True)
    result = AnalysisResult()
    n_swaps = math.ceil(plan.swaps_per_edge * b.n_edges)
    r = rewire(b, SwapPlan(n_swaps, derive_seed(plan.seed, 0)))
    overlap = len(b.edge_set() & r.edge_set()) / max(b.n_edges, 1)
    result.summary["rewire_check"] = {
        "n_swaps": n_swaps,
        "shareholder_degrees_preserved": bool(np.array_equal(b.shareholder_degrees(), r.shareholder_degrees())),
        "company_degrees_preserved": bool(np.array_equal(b.company_degrees(), r.company_degrees())),
        "edge_overlap_fraction": overlap,
    }
    p = project(b)
    run_metrics(b, p, plan, out, prov, result)
    result.summary["failed"] = dict(sorted(result.failed.items()))
    result.files.append(write_json(out / "nullcheck.json", result.summary, prov))
    return result
