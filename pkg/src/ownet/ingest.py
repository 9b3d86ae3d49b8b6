"""Reading and writing ownership data, and synthetic network generation.

On-disk layout: an edge CSV (``shareholder_id,company_id`` with an optional
``stake`` column), a type CSV (``shareholder_id,type_id``) and a small
``key = value`` manifest that names both files relative to itself.
"""

from __future__ import annotations

import csv
import hashlib
import heapq
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .graph import BipartiteNetwork, LabelError
from .types import N_TYPES, OwnerType

log = logging.getLogger(__name__)


class InputError(ValueError):
    """Malformed or inconsistent input files."""


# --------------------------------------------------------------------------
# manifest

@dataclass(frozen=True)
class DatasetManifest:
    country_tag: str
    year: int
    edge_file: Path
    type_file: Path
    checksum: str | None = None

    @classmethod
    def read(cls, path: str | Path) -> "DatasetManifest":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read manifest {path}: {exc}") from exc
        fields: dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            fields[key] = value
        missing = {"edge_file", "type_file"} - fields.keys()
        if missing:
            raise InputError(f"{path}: manifest lacks {', '.join(sorted(missing))}")
        base = path.parent
        try:
            year = int(fields.get("year", "0"))
        except ValueError:
            raise InputError(f"{path}: year must be an integer") from None
        return cls(
            country_tag=fields.get("country_tag", ""),
            year=year,
            edge_file=base / fields["edge_file"],
            type_file=base / fields["type_file"],
            checksum=fields.get("checksum") or None,
        )

    def write(self, path: str | Path) -> None:
        path = Path(path)
        base = path.parent
        lines = [
            f"country_tag = {self.country_tag}",
            f"year = {self.year}",
            f"edge_file = {_relative(self.edge_file, base)}",
            f"type_file = {_relative(self.type_file, base)}",
        ]
        if self.checksum:
            lines.append(f"checksum = {self.checksum}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    def compute_checksum(self) -> str:
        return content_checksum(self.edge_file.read_bytes(), self.type_file.read_bytes())


def _relative(p: Path, base: Path) -> str:
    try:
        return str(Path(p).resolve().relative_to(base.resolve()))
    except ValueError:
        return str(p)


def content_checksum(edge_bytes: bytes, type_bytes: bytes) -> str:
    h = hashlib.sha256()
    for chunk in (edge_bytes, type_bytes):
        h.update(len(chunk).to_bytes(8, "little"))
        h.update(chunk)
    return "sha256:" + h.hexdigest()


# --------------------------------------------------------------------------
# load / export

def _rows(data: bytes, name: str):
    reader = csv.reader(io.StringIO(data.decode("utf-8-sig")))
    header = next(reader, None)
    if header is None:
        return [], []
    return [h.strip().lower() for h in header], [(i, row) for i, row in enumerate(reader, 2)]


def load(manifest: DatasetManifest | str | Path, min_stake: float | None = None) -> BipartiteNetwork:
    """Read a dataset into a deduplicated :class:`BipartiteNetwork`.

    ``min_stake`` drops holdings whose ``stake`` column is below the
    threshold; by default nothing is filtered.
    """
    if not isinstance(manifest, DatasetManifest):
        manifest = DatasetManifest.read(manifest)
    try:
        edge_bytes = manifest.edge_file.read_bytes()
        type_bytes = manifest.type_file.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read input: {exc}") from exc
    if manifest.checksum:
        actual = content_checksum(edge_bytes, type_bytes)
        if actual != manifest.checksum:
            raise InputError(f"checksum mismatch: manifest {manifest.checksum}, files {actual}")

    header, rows = _rows(edge_bytes, str(manifest.edge_file))
    if not rows:
        raise InputError(f"{manifest.edge_file}: no edges")
    stake_col = header.index("stake") if "stake" in header else None
    if min_stake is not None and stake_col is None:
        raise InputError(f"{manifest.edge_file}: min_stake given but no stake column")
    edges = []
    bad = []
    for lineno, row in rows:
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < 2 or not row[0].strip() or not row[1].strip():
            bad.append(lineno)
            continue
        if min_stake is not None:
            try:
                if float(row[stake_col]) < min_stake:
                    continue
            except (ValueError, IndexError):
                bad.append(lineno)
                continue
        edges.append((row[0].strip(), row[1].strip()))
    if bad:
        raise InputError(f"{manifest.edge_file}: malformed rows at lines {_lines(bad)}")
    if not edges:
        raise InputError(f"{manifest.edge_file}: no edges")

    _, trows = _rows(type_bytes, str(manifest.type_file))
    types: dict[str, int] = {}
    bad = []
    for lineno, row in trows:
        if not row or all(not c.strip() for c in row):
            continue
        try:
            types[row[0].strip()] = int(OwnerType.parse(row[1]))
        except (ValueError, IndexError):
            bad.append(lineno)
    if bad:
        raise InputError(f"{manifest.type_file}: unparseable type ids at lines {_lines(bad)}")

    b = BipartiteNetwork.from_edges(edges, types)
    log.info(
        "loaded %s %s: %d shareholders, %d companies, %d edges",
        manifest.country_tag or "dataset", manifest.year or "", b.n_shareholders, b.n_companies, b.n_edges,
    )
    return b


def _lines(linenos: Sequence[int]) -> str:
    shown = ", ".join(map(str, linenos[:20]))
    return shown + (f" (+{len(linenos) - 20} more)" if len(linenos) > 20 else "")


def export(
    b: BipartiteNetwork,
    path: str | Path,
    country_tag: str = "",
    year: int = 0,
) -> DatasetManifest:
    """Write ``b`` as edge/type CSVs plus a manifest at ``path``.

    ``path`` is the manifest file; the CSVs go next to it.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        stem = path.stem
        edge_path = path.parent / f"{stem}_edges.csv"
        type_path = path.parent / f"{stem}_types.csv"
        edge_bytes = _edge_csv(b)
        type_bytes = _type_csv(b)
        edge_path.write_bytes(edge_bytes)
        type_path.write_bytes(type_bytes)
        manifest = DatasetManifest(
            country_tag, year, edge_path, type_path, content_checksum(edge_bytes, type_bytes)
        )
        manifest.write(path)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc
    return manifest


def _edge_csv(b: BipartiteNetwork) -> bytes:
    out = ["shareholder_id,company_id"]
    sid, cid = b.shareholder_ids, b.company_ids
    out.extend(f"{sid[s]},{cid[c]}" for s, c in zip(b.edge_shareholder.tolist(), b.edge_company.tolist()))
    return ("\n".join(out) + "\n").encode("utf-8")


def _type_csv(b: BipartiteNetwork) -> bytes:
    out = ["shareholder_id,type_id"]
    out.extend(f"{s},{t}" for s, t in zip(b.shareholder_ids, b.types.tolist()))
    return ("\n".join(out) + "\n").encode("utf-8")


# --------------------------------------------------------------------------
# synthetic networks

@dataclass(frozen=True)
class DegreeLaw:
    """Degree distribution for one side of a synthetic network.

    ``kind`` is ``"power"`` (P(k) ~ k^-gamma on [k_min, k_max]),
    ``"poisson"`` (mean ``mean``, floored at ``k_min``) or ``"sequence"``
    (use ``sequence`` verbatim).
    """

    kind: str = "power"
    gamma: float = 2.5
    k_min: int = 1
    k_max: int = 1000
    mean: float = 0.0
    sequence: tuple[int, ...] = ()

    @classmethod
    def power(cls, gamma: float, k_min: int = 1, k_max: int = 1000) -> "DegreeLaw":
        return cls("power", gamma=gamma, k_min=k_min, k_max=k_max)

    @classmethod
    def fixed(cls, k: int) -> "DegreeLaw":
        return cls("power", gamma=2.0, k_min=k, k_max=k)

    @classmethod
    def explicit(cls, sequence: Sequence[int]) -> "DegreeLaw":
        return cls("sequence", sequence=tuple(int(k) for k in sequence))

    @classmethod
    def poisson(cls, mean: float, k_min: int = 0) -> "DegreeLaw":
        return cls("poisson", mean=mean, k_min=k_min)

    def validate(self, n: int) -> None:
        if self.kind == "power":
            if not self.gamma > 1:
                raise ValueError(f"power-law exponent must exceed 1, got {self.gamma}")
            if self.k_min < 1:
                raise ValueError("k_min must be >= 1")
            if self.k_min > self.k_max:
                raise ValueError(f"k_min {self.k_min} > k_max {self.k_max}")
        elif self.kind == "sequence":
            if len(self.sequence) != n:
                raise ValueError(f"degree sequence has {len(self.sequence)} entries, need {n}")
            if any(k < 0 for k in self.sequence):
                raise ValueError("negative degree in sequence")
        elif self.kind == "poisson":
            if self.mean <= 0:
                raise ValueError("poisson mean must be positive")
        else:
            raise ValueError(f"unknown degree law {self.kind!r}")

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "sequence":
            return np.asarray(self.sequence, dtype=np.int64)
        if self.kind == "poisson":
            return np.maximum(rng.poisson(self.mean, size=n), self.k_min).astype(np.int64)
        return sample_power_law(n, self.gamma, self.k_min, self.k_max, rng)

    def to_dict(self) -> dict:
        if self.kind == "sequence":
            return {"kind": "sequence", "sequence": list(self.sequence)}
        if self.kind == "poisson":
            return {"kind": "poisson", "mean": self.mean, "k_min": self.k_min}
        return {"kind": "power", "gamma": self.gamma, "k_min": self.k_min, "k_max": self.k_max}

    @classmethod
    def from_dict(cls, d: dict) -> "DegreeLaw":
        kind = d.get("kind", "power")
        if kind == "sequence":
            return cls.explicit(d["sequence"])
        if kind == "poisson":
            return cls.poisson(float(d["mean"]), int(d.get("k_min", 0)))
        return cls.power(float(d["gamma"]), int(d.get("k_min", 1)), int(d.get("k_max", 1000)))


def sample_power_law(n: int, gamma: float, k_min: int, k_max: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` integers from P(k) proportional to k^-gamma on ``[k_min, k_max]``."""
    k = np.arange(k_min, k_max + 1, dtype=np.float64)
    w = k ** -gamma
    cdf = np.cumsum(w)
    cdf /= cdf[-1]
    idx = np.searchsorted(cdf, rng.random(n), side="right")
    return (np.minimum(idx, len(k) - 1) + k_min).astype(np.int64)


@dataclass(frozen=True)
class SynthSpec:
    n_shareholders: int
    n_companies: int
    shareholder_degree_law: DegreeLaw
    company_degree_law: DegreeLaw
    type_mix: tuple[float, ...] = field(default_factory=lambda: tuple([1.0 / N_TYPES] * N_TYPES))
    seed: int = 0

    def validate(self) -> None:
        if self.n_shareholders < 1 or self.n_companies < 1:
            raise ValueError("need at least one shareholder and one company")
        if len(self.type_mix) != N_TYPES:
            raise ValueError(f"type_mix needs {N_TYPES} entries")
        if any(p < 0 for p in self.type_mix) or abs(sum(self.type_mix) - 1.0) > 1e-12:
            raise ValueError("type_mix must be non-negative and sum to 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.shareholder_degree_law.validate(self.n_shareholders)
        self.company_degree_law.validate(self.n_companies)

    def to_dict(self) -> dict:
        return {
            "n_shareholders": self.n_shareholders,
            "n_companies": self.n_companies,
            "shareholder_degree_law": self.shareholder_degree_law.to_dict(),
            "company_degree_law": self.company_degree_law.to_dict(),
            "type_mix": list(self.type_mix),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SynthSpec":
        mix = d.get("type_mix")
        return cls(
            n_shareholders=int(d["n_shareholders"]),
            n_companies=int(d["n_companies"]),
            shareholder_degree_law=DegreeLaw.from_dict(d["shareholder_degree_law"]),
            company_degree_law=DegreeLaw.from_dict(d["company_degree_law"]),
            type_mix=tuple(float(x) for x in mix) if mix is not None else tuple([1.0 / N_TYPES] * N_TYPES),
            seed=int(d.get("seed", 0)),
        )


def _trim_largest(deg: np.ndarray, excess: int) -> None:
    """Remove ``excess`` stubs, one at a time, from the currently largest entry."""
    heap = [(-int(k), i) for i, k in enumerate(deg.tolist()) if k > 0]
    heapq.heapify(heap)
    for _ in range(excess):
        k, i = heapq.heappop(heap)
        deg[i] -= 1
        if k + 1 < 0:
            heapq.heappush(heap, (k + 1, i))


def generate(spec: SynthSpec) -> BipartiteNetwork:
    """Random bipartite ownership network with the requested degree and type profile.

    Stubs are matched uniformly at random; repeated shareholder-company pairs
    are collapsed. Stub totals are equalised by trimming the side with more
    stubs, always from its largest remaining degree. Nodes left with no
    stubs are dropped.
    """
    spec.validate()
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    k_s = spec.shareholder_degree_law.sample(spec.n_shareholders, rng)
    k_c = spec.company_degree_law.sample(spec.n_companies, rng)
    diff = int(k_c.sum() - k_s.sum())
    if diff > 0:
        _trim_largest(k_c, diff)
    elif diff < 0:
        _trim_largest(k_s, -diff)
    if k_s.sum() == 0:
        raise ValueError("degree laws leave no stubs to match")
    s_stubs = np.repeat(np.arange(spec.n_shareholders, dtype=np.int64), k_s)
    c_stubs = rng.permutation(np.repeat(np.arange(spec.n_companies, dtype=np.int64), k_c))
    labels = rng.choice(np.arange(1, N_TYPES + 1), size=spec.n_shareholders, p=np.asarray(spec.type_mix))

    keep_s = np.flatnonzero(k_s > 0)
    keep_c = np.flatnonzero(k_c > 0)
    s_map = np.full(spec.n_shareholders, -1, dtype=np.int64)
    s_map[keep_s] = np.arange(len(keep_s))
    c_map = np.full(spec.n_companies, -1, dtype=np.int64)
    c_map[keep_c] = np.arange(len(keep_c))
    width_s = len(str(spec.n_shareholders))
    width_c = len(str(spec.n_companies))
    return BipartiteNetwork(
        tuple(f"S{i:0{width_s}d}" for i in keep_s.tolist()),
        tuple(f"C{i:0{width_c}d}" for i in keep_c.tolist()),
        s_map[s_stubs],
        c_map[c_stubs],
        labels[keep_s],
    )


def turkey_like(seed: int = 0) -> SynthSpec:
    """Synthetic spec sized like the Turkish data.

    57,820 shareholders with the Turkish type census; the degree laws are
    tuned so the projection has roughly 93-95k edges.
    """
    from .types import TURKEY_TYPE_COUNTS, type_mix

    return SynthSpec(
        n_shareholders=57820,
        n_companies=22445,
        shareholder_degree_law=DegreeLaw.power(3.8, 1, 300),
        company_degree_law=DegreeLaw.power(3.0, 2, 300),
        type_mix=tuple(type_mix(TURKEY_TYPE_COUNTS)),
        seed=seed,
    )


def configuration_graph(degrees: Sequence[int], seed: int, types=None):
    """Simple undirected graph by stub matching; loops and multi-edges are dropped.

    Returns a :class:`~ownet.graph.TypedProjection`.
    """
    from .graph import TypedProjection

    deg = np.asarray(degrees, dtype=np.int64)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    stubs = np.repeat(np.arange(len(deg), dtype=np.int64), deg)
    if len(stubs) % 2:
        stubs = stubs[:-1]
    stubs = rng.permutation(stubs).reshape(-1, 2)
    return TypedProjection.from_edge_list(len(deg), stubs, types)
