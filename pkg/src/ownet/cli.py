"""ownet command-line interface.

Subcommands: generate, summary, analyze, communities, percolate, nullcheck.

Exit codes: 0 success, 2 configuration error, 3 input error, 4 compute error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

from . import __version__
from ._parallel import resolve_jobs
from .graph import LabelError, project
from .ingest import DatasetManifest, InputError, SynthSpec, export, generate, load, turkey_like
from .report import (
    ANALYSES,
    BINS_HEADER,
    AnalysisPlan,
    AnalysisResult,
    Provenance,
    analyze,
    bins_rows,
    nullcheck,
    run_communities,
    run_percolation,
    summary_fields,
    write_csv,
    write_json,
)
from .types import OwnerType

log = logging.getLogger("ownet")

EXIT_OK, EXIT_CONFIG, EXIT_INPUT, EXIT_COMPUTE = 0, 2, 3, 4
PRESETS = {"turkey": turkey_like}
DEFAULT_SEED = 0


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# argument parsing

def _add_common(p: argparse.ArgumentParser, with_input: bool = True) -> None:
    if with_input:
        p.add_argument("input", help="dataset manifest, synthetic-spec JSON, or a preset name (turkey)")
        p.add_argument("--min-stake", type=float, default=None, help="drop holdings below this stake")
    p.add_argument("--seed", type=int, default=None, help="master seed for every random choice")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: $OWNET_JOBS or 1)")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: ./out)")
    p.add_argument("--ci", action="store_true", help="strict mode: a missing --seed is an error (also $CI)")
    p.add_argument("-v", "--verbose", action="count", default=0)


def _add_null(p, realizations=100):
    p.add_argument("--realizations", type=int, default=realizations, help="null-model realisations")
    p.add_argument("--swaps-per-edge", type=float, default=10.0, help="double-edge swaps per ownership edge")


def _add_bins(p):
    p.add_argument("--bin-ratio", type=float, default=2.0, help="log-bin width ratio (> 1)")
    p.add_argument("--fit-range", type=float, nargs=2, metavar=("LO", "HI"), help="degree range for the power-law fit")


def _add_communities(p, nulls=3):
    p.add_argument("--size-fit-range", type=float, nargs=2, metavar=("LO", "HI"),
                   help="community-size range for the power-law fit")
    p.add_argument("--focal-types", nargs="+", default=["Families", "Corporates"],
                   help="owner types (id or name) for the composition histograms")
    p.add_argument("--min-community-size", type=int, default=4,
                   help="second composition histogram keeps communities at least this large")
    p.add_argument("--community-nulls", type=int, default=nulls,
                   help="null realisations for the community size comparison")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ownet", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"ownet {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic dataset (edges, types, manifest)")
    g.add_argument("spec", help="synthetic-spec JSON or preset name (turkey)")
    g.add_argument("--name", default="network", help="file stem for the manifest and CSVs")
    g.add_argument("--country-tag", default="SYN")
    g.add_argument("--year", type=int, default=0)
    _add_common(g, with_input=False)

    s = sub.add_parser("summary", help="counts, degree exponent and LCC statistics")
    _add_common(s)
    _add_bins(s)

    a = sub.add_parser("analyze", help="every analysis with null-model comparisons")
    _add_common(a)
    _add_null(a)
    _add_bins(a)
    _add_communities(a)
    a.add_argument("--percolation-types", nargs="+", help="owner types to remove (default: all in the LCC)")
    a.add_argument("--min-type-count", type=int, default=1, help="smallest type kept in the branching fit")
    a.add_argument("--skip", nargs="+", choices=ANALYSES, default=[], help="analyses to leave out")

    c = sub.add_parser("communities", help="Louvain and map-equation partitions")
    _add_common(c)
    _add_bins(c)
    _add_communities(c, nulls=0)
    c.add_argument("--swaps-per-edge", type=float, default=10.0)

    pc = sub.add_parser("percolate", help="remove nodes of one type at a time from the LCC")
    _add_common(pc)
    pc.add_argument("--types", nargs="+", help="owner types to remove (default: all in the LCC)")
    pc.add_argument("--realizations", type=int, default=100)

    n = sub.add_parser("nullcheck", help="check the rewiring and box per-type metrics against it")
    _add_common(n)
    _add_null(n, realizations=20)
    _add_bins(n)
    n.add_argument("--min-type-count", type=int, default=1)
    return ap


# --------------------------------------------------------------------------
# config

def _ci_mode(args) -> bool:
    env = os.environ.get("CI", "").strip().lower()
    return bool(args.ci or (env and env not in ("0", "false", "no")))


def _types(values, flag: str) -> tuple[int, ...] | None:
    if not values:
        return None
    try:
        return tuple(int(OwnerType.parse(v)) for v in values)
    except ValueError as exc:
        raise ConfigError(f"{flag}: {exc}") from None


def _range(r, flag: str):
    if r is None:
        return None
    lo, hi = r
    if not (0 < lo < hi) or not math.isfinite(hi):
        raise ConfigError(f"{flag} needs 0 < LO < HI, got {lo} {hi}")
    return (float(lo), float(hi))


def resolve_seed(args) -> int | None:
    if args.seed is None and args.command == "generate" and args.spec not in PRESETS:
        return None  # a synthetic-spec file carries its own seed
    if args.seed is None:
        if _ci_mode(args):
            raise ConfigError("--seed is required in CI mode")
        log.warning("no --seed given; using %d", DEFAULT_SEED)
        return DEFAULT_SEED
    if not 0 <= args.seed < 2**63:
        raise ConfigError("--seed must be a non-negative 63-bit integer")
    return args.seed


def validate(args) -> dict:
    """Check every numeric knob before any compute; returns the normalised config."""
    cfg: dict = {"command": args.command}
    cfg["seed"] = resolve_seed(args)
    try:
        cfg["jobs"] = resolve_jobs(args.jobs)
    except ValueError as exc:
        raise ConfigError(f"--jobs / OWNET_JOBS: {exc}") from None
    for name in ("realizations", "community_nulls", "min_type_count", "min_community_size"):
        if hasattr(args, name):
            v = getattr(args, name)
            lowest = 1 if name in ("min_type_count", "min_community_size") else 0
            if v < lowest:
                raise ConfigError(f"--{name.replace('_', '-')} must be >= {lowest}")
            cfg[name] = v
    if hasattr(args, "swaps_per_edge"):
        if not (args.swaps_per_edge >= 0 and math.isfinite(args.swaps_per_edge)):
            raise ConfigError("--swaps-per-edge must be a finite number >= 0")
        cfg["swaps_per_edge"] = args.swaps_per_edge
    if hasattr(args, "bin_ratio"):
        if not (args.bin_ratio > 1 and math.isfinite(args.bin_ratio)):
            raise ConfigError("--bin-ratio must exceed 1")
        cfg["bin_ratio"] = args.bin_ratio
    if hasattr(args, "fit_range"):
        cfg["fit_range"] = _range(args.fit_range, "--fit-range")
    if hasattr(args, "size_fit_range"):
        cfg["size_fit_range"] = _range(args.size_fit_range, "--size-fit-range")
    if hasattr(args, "focal_types"):
        cfg["focal_types"] = _types(args.focal_types, "--focal-types")
    if hasattr(args, "percolation_types"):
        cfg["percolation_types"] = _types(args.percolation_types, "--percolation-types")
    if hasattr(args, "types"):
        cfg["percolation_types"] = _types(args.types, "--types")
    if hasattr(args, "skip"):
        cfg["skip"] = sorted(args.skip)
    if getattr(args, "min_stake", None) is not None:
        cfg["min_stake"] = args.min_stake
    return cfg


def _plan(cfg: dict) -> AnalysisPlan:
    return AnalysisPlan(
        seed=cfg["seed"],
        realizations=cfg.get("realizations", 0),
        swaps_per_edge=cfg.get("swaps_per_edge", 10.0),
        bin_ratio=cfg.get("bin_ratio", 2.0),
        fit_range=cfg.get("fit_range"),
        size_fit_range=cfg.get("size_fit_range"),
        percolation_types=cfg.get("percolation_types"),
        focal_types=cfg.get("focal_types") or AnalysisPlan.focal_types,
        min_community_size=cfg.get("min_community_size", 4),
        community_nulls=cfg.get("community_nulls", 0),
        min_type_count=cfg.get("min_type_count", 1),
        jobs=cfg["jobs"],
    )


# --------------------------------------------------------------------------
# inputs

def read_spec(text: str, seed: int | None) -> SynthSpec:
    """Preset name or path to a synthetic-spec JSON; ``seed`` replaces its own seed if given."""
    if text in PRESETS:
        return PRESETS[text](seed if seed is not None else DEFAULT_SEED)
    try:
        data = json.loads(Path(text).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read synthetic spec {text}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{text}: not valid JSON ({exc})") from exc
    try:
        spec = SynthSpec.from_dict(data)
        if seed is not None:
            spec = SynthSpec(**{**spec.__dict__, "seed": seed})
        spec.validate()
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(
            f"{text}: invalid synthetic spec ({exc}); needs n_shareholders >= 1, n_companies >= 1 "
            "and both degree laws"
        ) from exc
    return spec


def load_input(args, cfg: dict):
    """Return ``(network, input_checksum, input_description)``."""
    src = args.input
    if src in PRESETS or src.endswith(".json"):
        spec = read_spec(src, cfg["seed"] if src in PRESETS else None)
        b = generate(spec)
        desc = {"synthetic": spec.to_dict()}
        return b, None, desc
    m = DatasetManifest.read(src)
    b = load(m, cfg.get("min_stake"))
    checksum = m.checksum or m.compute_checksum()
    return b, checksum, {"manifest": {"country_tag": m.country_tag, "year": m.year}}


# --------------------------------------------------------------------------
# commands

def _finish(files) -> None:
    for f in files:
        print(str(f))


def cmd_generate(args, cfg) -> int:
    spec = read_spec(args.spec, cfg["seed"])
    b = generate(spec)
    out = Path(args.out)
    m = export(b, out / f"{args.name}.manifest", args.country_tag, args.year)
    spec_path = out / f"{args.name}_spec.json"
    spec_path.write_text(json.dumps(spec.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8")
    log.info("wrote %d shareholders, %d companies, %d edges", b.n_shareholders, b.n_companies, b.n_edges)
    _finish([out / f"{args.name}.manifest", m.edge_file, m.type_file, spec_path])
    return EXIT_OK


def _prov(cfg, checksum, desc) -> Provenance:
    hashed = {k: v for k, v in cfg.items() if k != "jobs"}
    hashed["input"] = desc
    return Provenance(cfg["seed"], hashed, checksum)


def cmd_summary(args, cfg) -> int:
    b, checksum, desc = load_input(args, cfg)
    prov = _prov(cfg, checksum, desc)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    p = project(b)
    fields, dist = summary_fields(b, p, cfg["bin_ratio"], cfg["fit_range"], cfg["jobs"])
    files = [
        write_json(out / "summary.json", fields, prov),
        write_csv(out / "degree_bins.csv", BINS_HEADER, bins_rows(dist), prov),
    ]
    _finish(files)
    return EXIT_OK


def cmd_analyze(args, cfg) -> int:
    b, checksum, desc = load_input(args, cfg)
    parts = tuple(a for a in ANALYSES if a not in cfg.get("skip", []))
    result = analyze(b, _plan(cfg), Path(args.out), _prov(cfg, checksum, desc), parts)
    _finish(result.files)
    return EXIT_COMPUTE if result.failed else EXIT_OK


def cmd_communities(args, cfg) -> int:
    b, checksum, desc = load_input(args, cfg)
    prov = _prov(cfg, checksum, desc)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    plan = _plan({**cfg, "realizations": 1 if cfg.get("community_nulls") else 0})
    result = AnalysisResult()
    run_communities(b, project(b), plan, out, prov, result)
    result.summary["failed"] = dict(sorted(result.failed.items()))
    result.files.append(write_json(out / "communities.json", result.summary, prov))
    _finish(result.files)
    return EXIT_COMPUTE if result.failed else EXIT_OK


def cmd_percolate(args, cfg) -> int:
    b, checksum, desc = load_input(args, cfg)
    prov = _prov(cfg, checksum, desc)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = AnalysisResult()
    run_percolation(project(b), _plan(cfg), out, prov, result)
    result.summary["failed"] = dict(sorted(result.failed.items()))
    result.files.append(write_json(out / "percolation.json", result.summary, prov))
    _finish(result.files)
    return EXIT_COMPUTE if result.failed else EXIT_OK


def cmd_nullcheck(args, cfg) -> int:
    if cfg["realizations"] < 1:
        raise ConfigError("nullcheck needs --realizations >= 1")
    b, checksum, desc = load_input(args, cfg)
    result = nullcheck(b, _plan(cfg), Path(args.out), _prov(cfg, checksum, desc))
    _finish(result.files)
    rc = result.summary["rewire_check"]
    ok = rc["shareholder_degrees_preserved"] and rc["company_degrees_preserved"]
    return EXIT_COMPUTE if result.failed or not ok else EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "summary": cmd_summary,
    "analyze": cmd_analyze,
    "communities": cmd_communities,
    "percolate": cmd_percolate,
    "nullcheck": cmd_nullcheck,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = validate(args)
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"ownet: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InputError, LabelError, FileNotFoundError) as exc:
        print(f"ownet: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - anything else is a compute failure
        log.debug("compute failure", exc_info=True)
        print(f"ownet: compute error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
