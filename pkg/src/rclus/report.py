"""Sweeps over K (or DBSCAN parameters) and table / JSON serialisation."""

from __future__ import annotations

import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import datasets
from .baselines import ORIENTATION, calinski_harabasz, connectivity, dunn, nncer, silhouette_asw
from .clustering import DbscanConfig, KMeansConfig, agglomerate, cut, dbscan, kmeans
from .core import ComputationError, DataError, DataMatrix, Labeling, distance_for, read_csv, read_labels
from .index import BinGrid, member_table, r_clus
from .simgen import GENERATORS

ALGORITHMS = ("kmeans", "hier-single", "hier-average", "dbscan", "labels")
INDICES = ("rclus", "dunn", "conn", "ch", "asw", "nncer")
FORMATS = ("tsv", "csv", "json")


def _is_unit_fraction(w: float) -> bool:
    try:
        BinGrid.from_width(w)
    except ValueError:
        return False
    return True


@dataclass
class RunManifest:
    """Everything needed to reproduce one report."""

    csv: str | None = None
    header: bool = True
    delimiter: str = ","
    dataset: str | None = None
    generator: str | None = None
    generator_params: dict = field(default_factory=dict)
    labels: str | None = None
    standardize: bool = False
    metric: str = "euclidean"
    algo: str = "kmeans"
    k_min: int = 2
    k_max: int = 6
    widths: list = field(default_factory=lambda: [0.1])
    indices: list = field(default_factory=lambda: list(INDICES))
    J: int = 10
    l: int = 10
    restarts: int = 25
    eps: list = field(default_factory=list)
    min_pts: list = field(default_factory=list)
    seed: int = 0
    format: str = "tsv"

    def validate(self) -> "RunManifest":
        sources = [s for s in (self.csv, self.dataset, self.generator) if s is not None]
        if len(sources) != 1:
            raise ValueError("choose exactly one of csv, dataset, generator")
        if self.generator is not None and self.generator not in GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}; choose from {', '.join(GENERATORS)}")
        if self.algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algo!r}")
        if self.algo == "labels" and not self.labels:
            raise ValueError("algo 'labels' needs a label file")
        if self.algo not in ("dbscan", "labels") and not 2 <= self.k_min <= self.k_max:
            raise ValueError("need 2 <= k_min <= k_max")
        if not self.widths:
            raise ValueError("need at least one bin width")
        bad = [w for w in self.widths if not _is_unit_fraction(w) or round(1 / w) < 2]
        if bad:
            raise ValueError(f"bin widths must be 1/N for an integer N >= 2, got {bad}")
        unknown = set(self.indices) - set(INDICES)
        if unknown:
            raise ValueError(f"unknown indices {sorted(unknown)}")
        if self.algo == "dbscan":
            if not self.eps or not self.min_pts:
                raise ValueError("dbscan needs eps and min_pts")
            if len(self.eps) != len(self.min_pts) and 1 not in (len(self.eps), len(self.min_pts)):
                raise ValueError("eps and min_pts lists must have equal length (or one value)")
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}")
        return self

    def dbscan_pairs(self) -> list[tuple[float, int]]:
        m = max(len(self.eps), len(self.min_pts))
        eps = self.eps * m if len(self.eps) == 1 else self.eps
        mp = self.min_pts * m if len(self.min_pts) == 1 else self.min_pts
        return [(float(e), int(p)) for e, p in zip(eps, mp)]


def column_names(manifest: RunManifest) -> list[str]:
    cols = []
    for name in INDICES:
        if name not in manifest.indices:
            continue
        if name == "rclus":
            cols += [f"rclus(w={w:g})" for w in manifest.widths]
        else:
            cols.append(name)
    return cols


def _base(col: str) -> str:
    return col.split("(")[0]


@dataclass
class ReportRow:
    key: dict
    values: dict
    noise: int = 0
    errors: list = field(default_factory=list)

    @property
    def label(self) -> str:
        if "eps" in self.key:
            return f"eps={self.key['eps']:g}/minpts={self.key['min_pts']}"
        return str(self.key["K"])


@dataclass
class IndexReport:
    manifest: dict
    columns: list
    rows: list
    best: dict = field(default_factory=dict)

    def compute_best(self) -> dict:
        best = {}
        for col in self.columns:
            sign = 1.0 if ORIENTATION[_base(col)] == "maximize" else -1.0
            top = None
            for row in self.rows:
                v = row.values.get(col)
                if v is None or not math.isfinite(v):
                    continue
                if top is None or sign * v > sign * top[0]:
                    top = (v, row.label)
            if top is not None:
                best[col] = top[1]
        self.best = best
        return best

    @property
    def errors(self) -> list[str]:
        return [f"{r.label}: {e}" for r in self.rows for e in r.errors]

    def to_dict(self) -> dict:
        def clean(v):
            return None if (isinstance(v, float) and not math.isfinite(v)) else v

        return {
            "manifest": self.manifest,
            "columns": list(self.columns),
            "rows": [
                {
                    "key": r.key,
                    "values": {c: clean(r.values.get(c)) for c in self.columns},
                    "noise": r.noise,
                    "errors": list(r.errors),
                }
                for r in self.rows
            ],
            "best": dict(self.best),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IndexReport":
        rows = [
            ReportRow(
                key=r["key"],
                values={c: (math.nan if v is None else float(v)) for c, v in r["values"].items()},
                noise=int(r["noise"]),
                errors=list(r["errors"]),
            )
            for r in d["rows"]
        ]
        return cls(d["manifest"], list(d["columns"]), rows, dict(d["best"]))

    @classmethod
    def from_json(cls, text) -> "IndexReport":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other) -> bool:
        if not isinstance(other, IndexReport):
            return NotImplemented
        return json.dumps(self.to_dict(), sort_keys=True) == json.dumps(other.to_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------


def load_data(manifest: RunManifest):
    """Returns (data, truth-or-None)."""
    truth = None
    if manifest.csv is not None:
        data, _ = read_csv(manifest.csv, header=manifest.header, delimiter=manifest.delimiter)
    elif manifest.dataset is not None:
        try:
            data, _ = datasets.load(manifest.dataset)
        except ValueError as e:
            raise DataError(str(e)) from None
    else:
        params = dict(manifest.generator_params)
        params.setdefault("seed", manifest.seed)
        ds = GENERATORS[manifest.generator](**params)
        data, truth = ds.data, ds.truth
    if manifest.standardize:
        data = data.standardized()
    return data, truth


def _labelings(manifest: RunManifest, data: DataMatrix, dist: np.ndarray):
    """Yield (key, labeling) in row order, one clustering per row."""
    algo = manifest.algo
    if algo == "labels":
        lab = read_labels(manifest.labels)
        if lab.n != data.n:
            raise DataError(f"label file has {lab.n} entries for {data.n} members")
        yield {"K": lab.K}, lab
    elif algo == "dbscan":
        for eps, mp in manifest.dbscan_pairs():
            lab = dbscan(dist, DbscanConfig(eps, mp))
            yield {"eps": eps, "min_pts": mp, "K": lab.K}, lab
    elif algo == "kmeans":
        for K in range(manifest.k_min, manifest.k_max + 1):
            cfg = KMeansConfig(K, restarts=manifest.restarts, seed=manifest.seed)
            if K > data.n:
                raise ComputationError(f"K = {K} exceeds n = {data.n}")
            yield {"K": K}, kmeans(data, cfg).labeling
    else:
        merges = agglomerate(dist, "single" if algo == "hier-single" else "average")
        for K in range(manifest.k_min, manifest.k_max + 1):
            yield {"K": K}, cut(merges, data.n, K)


def evaluate(data: DataMatrix, dist: np.ndarray, lab: Labeling, manifest: RunManifest, columns) -> tuple[dict, list]:
    values: dict = {}
    errors: list = []
    for col in columns:
        name = _base(col)
        try:
            if name == "rclus":
                w = float(col[len("rclus(w=") : -1])
                v = r_clus(dist, lab, BinGrid.from_width(w), manifest.seed)
            elif name == "dunn":
                v = dunn(dist, lab)
            elif name == "conn":
                v = connectivity(dist, lab, manifest.J)
            elif name == "ch":
                v = calinski_harabasz(data, lab)
            elif name == "asw":
                v = silhouette_asw(dist, lab)
            else:
                v = nncer(dist, lab, manifest.l, manifest.seed)
        except ComputationError as e:
            v = math.nan
            errors.append(f"{col}: {e}")
        values[col] = float(v)
    return values, errors


def run_sweep(manifest: RunManifest) -> IndexReport:
    manifest.validate()
    data, _ = load_data(manifest)
    dist = distance_for(manifest.metric, data)
    columns = column_names(manifest)
    rows = []
    for key, lab in _labelings(manifest, data, dist):
        values, errors = evaluate(data, dist, lab, manifest, columns)
        rows.append(ReportRow(key, values, lab.n_noise, errors))
    report = IndexReport(asdict(manifest), columns, rows)
    report.compute_best()
    return report


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

# table output follows the published layout: R_clus and Dunn x 100, NNCER in %
_TABLE_SCALE = {"rclus": 100.0, "dunn": 100.0, "nncer": 100.0}


def _table_header(col: str) -> str:
    name = _base(col)
    if name == "rclus":
        return "Rclus" + col[len("rclus") :] + "x100"
    return {"dunn": "Dunnx100", "conn": "Conn", "ch": "CH", "asw": "ASW", "nncer": "NNCER%"}[name]


def _fmt(v) -> str:
    if v is None or not math.isfinite(v):
        return "NA"
    return f"{v:.3f}"


def emit_report(report: IndexReport, fmt: str = "tsv") -> bytes:
    """Deterministic serialisation. Tables use 3 decimals; JSON keeps full precision."""
    if not report.rows:
        raise ValueError("empty report")
    if fmt == "json":
        return (json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n").encode()
    if fmt not in ("tsv", "csv"):
        raise ValueError(f"unknown format {fmt!r}")
    sep = "\t" if fmt == "tsv" else ","
    dbscan_rows = any("eps" in r.key for r in report.rows)
    keys = ["eps", "min_pts", "K"] if dbscan_rows else ["K"]
    out = io.StringIO()
    out.write(sep.join(keys + [_table_header(c) for c in report.columns] + ["noise"]) + "\n")
    for r in report.rows:
        cells = [f"{r.key[k]:g}" if k == "eps" else str(r.key[k]) for k in keys]
        cells += [_fmt(r.values.get(c) * _TABLE_SCALE.get(_base(c), 1.0)) for c in report.columns]
        cells.append(str(r.noise))
        out.write(sep.join(cells) + "\n")
    best = ["best"] + [""] * (len(keys) - 1) + [report.best.get(c, "") for c in report.columns] + [""]
    out.write(sep.join(best) + "\n")
    return out.getvalue().encode()


def dump_member_diagnostics(manifest: RunManifest, K: int | None = None) -> bytes:
    """Per-member table (k, m, nc, M, f1, f2, rho) for one clustering.

    Uses the first bin width of the manifest. For DBSCAN the first
    (eps, min_pts) pair is used and ``K`` is ignored.
    """
    manifest.validate()
    data, _ = load_data(manifest)
    dist = distance_for(manifest.metric, data)
    lab = None
    for key, cand in _labelings(manifest, data, dist):
        if manifest.algo in ("dbscan", "labels") or key["K"] == K:
            lab = cand
            break
    if lab is None:
        raise ValueError(f"K = {K} outside the manifest range")
    grid = BinGrid.from_width(manifest.widths[0])
    t = member_table(dist, lab, grid, manifest.seed)
    out = io.StringIO()
    out.write("\t".join(["member", "k", "m", "nc", "M", "f1", "f2", "rho"]) + "\n")
    for i in range(len(t.member)):
        out.write(
            "\t".join(
                [
                    str(t.member[i] + 1),
                    str(t.cluster[i]),
                    str(t.position[i]),
                    str(t.nc[i]),
                    repr(float(t.scale[i])),
                    ",".join(map(str, t.f1[i])),
                    ",".join(map(str, t.f2[i])),
                    repr(float(t.rho[i])),
                ]
            )
            + "\n"
        )
    out.write(f"# Rclus\t{t.r_clus!r}\tnoise\t{t.n_noise}\tN\t{grid.N}\n")
    return out.getvalue().encode()
