"""Data containers, interpoint distances, seeded random streams and file I/O."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Union

import numpy as np
from scipy.spatial.distance import pdist, squareform

NOISE = 0
NOISE_TOKEN = "NOISE"


class DataError(ValueError):
    """Input data is malformed (bad CSV, non-finite values, bad labels)."""


class ComputationError(ValueError):
    """An index or algorithm is undefined for the given input."""


# ---------------------------------------------------------------------------
# containers
# ---------------------------------------------------------------------------


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """n members by p variables of finite real measurements.

    A 1-D input is read as a single variable (one column).
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2:
            raise DataError(f"data must be 2-D, got shape {v.shape}")
        bad = np.argwhere(~np.isfinite(v))
        if len(bad):
            r, c = bad[0]
            raise DataError(f"non-finite value at row {r + 1}, column {c + 1}")
        if v.shape[0] < 2:
            raise DataError("need at least 2 members")
        if v.shape[1] < 1:
            raise DataError("need at least 1 variable")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def standardized(self) -> "DataMatrix":
        """Per-column z-scores (sample sd); constant columns are only centred."""
        v = self.values
        sd = v.std(axis=0, ddof=1)
        sd[sd == 0] = 1.0
        return DataMatrix((v - v.mean(axis=0)) / sd)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True, eq=False)
class Labeling:
    """Cluster assignment of each member: ids 1..K, or NOISE (0).

    Every id in 1..K must be used. Use :meth:`from_array` to normalise
    arbitrary cluster codes.
    """

    labels: np.ndarray

    def __post_init__(self):
        lab = np.asarray(self.labels)
        if lab.ndim != 1 or lab.size == 0:
            raise DataError("labels must be a non-empty 1-D array")
        if not np.issubdtype(lab.dtype, np.integer):
            if not np.all(np.equal(np.mod(lab, 1), 0)):
                raise DataError("cluster ids must be integers")
        lab = lab.astype(np.int64)
        if lab.min() < 0:
            raise DataError("cluster ids must be >= 1 (0 marks noise)")
        used = np.unique(lab[lab != NOISE])
        if len(used) and not np.array_equal(used, np.arange(1, len(used) + 1)):
            raise DataError(f"cluster ids must be exactly 1..K, got {used.tolist()}")
        object.__setattr__(self, "labels", _frozen(lab))

    @classmethod
    def from_array(cls, values: Iterable, noise=None) -> "Labeling":
        """Map arbitrary codes to ids 1..K in sorted code order.

        Entries equal to ``noise`` (if given) become NOISE.
        """
        arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
        is_noise = np.zeros(len(arr), dtype=bool) if noise is None else (arr == noise)
        out = np.zeros(len(arr), dtype=np.int64)
        if (~is_noise).any():
            _, inv = np.unique(arr[~is_noise], return_inverse=True)
            out[~is_noise] = inv + 1
        return cls(out)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def K(self) -> int:
        return int(self.labels.max()) if self.labels.size else 0

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.K + 1)[1:]

    @property
    def noise_mask(self) -> np.ndarray:
        return self.labels == NOISE

    @property
    def n_noise(self) -> int:
        return int(self.noise_mask.sum())

    def members(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.labels == k)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        return isinstance(other, Labeling) and np.array_equal(self.labels, other.labels)

    def __hash__(self):
        return hash(self.labels.tobytes())


LabelsLike = Union[Labeling, np.ndarray, list, tuple]


def as_labeling(labels: LabelsLike) -> Labeling:
    if isinstance(labels, Labeling):
        return labels
    arr = np.asarray(labels)
    try:
        return Labeling(arr)
    except DataError:
        return Labeling.from_array(arr)


def as_data(data) -> DataMatrix:
    return data if isinstance(data, DataMatrix) else DataMatrix(data)


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------


def check_distance_matrix(d, *, name: str = "distance matrix") -> np.ndarray:
    """Validate a square, symmetric, zero-diagonal, nonnegative matrix."""
    d = np.asarray(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ComputationError(f"{name} must be square, got shape {d.shape}")
    if not np.isfinite(d).all():
        raise ComputationError(f"{name} has non-finite entries")
    if np.any(np.diag(d) != 0):
        raise ComputationError(f"{name} must have a zero diagonal")
    if np.any(d < 0):
        raise ComputationError(f"{name} has negative entries")
    if not np.array_equal(d, d.T):
        raise ComputationError(f"{name} is not symmetric")
    return d


def euclidean_distances(data) -> np.ndarray:
    """Full n x n matrix of Euclidean distances between rows."""
    x = as_data(data).values
    return squareform(pdist(x, "euclidean"))


MetricFn = Callable[[np.ndarray], np.ndarray]

_METRICS: dict[str, MetricFn] = {"euclidean": euclidean_distances}


def register_metric(name: str, fn: MetricFn, *, overwrite: bool = False) -> None:
    """Register ``fn(values) -> n x n matrix`` under ``name``."""
    if name in _METRICS and not overwrite:
        raise ValueError(f"metric {name!r} already registered")
    _METRICS[name] = fn


def unregister_metric(name: str) -> None:
    if name == "euclidean":
        raise ValueError("cannot remove the built-in metric")
    _METRICS.pop(name, None)


def registered_metrics() -> list[str]:
    return sorted(_METRICS)


def distance_for(metric: str, data) -> np.ndarray:
    try:
        fn = _METRICS[metric]
    except KeyError:
        raise ValueError(
            f"unknown metric {metric!r}; registered: {', '.join(registered_metrics())}"
        ) from None
    x = as_data(data)
    d = fn(x.values)
    d = check_distance_matrix(d, name=f"metric {metric!r} output")
    if d.shape[0] != x.n:
        raise ComputationError(f"metric {metric!r} returned {d.shape[0]} rows for {x.n} members")
    return d


# ---------------------------------------------------------------------------
# randomness
# ---------------------------------------------------------------------------


class Stream(enum.IntEnum):
    """Purpose tags separating the random streams derived from one seed."""

    NEAREST_TIE = 1
    NNCER_TIE = 2
    KMEANS_INIT = 3
    SIMULATION = 4


def check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return seed


def stream(seed: int, purpose: Stream, index: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (seed, purpose, index).

    Each member (or restart, or dataset) gets its own stream, so draws do
    not depend on evaluation order.
    """
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=(int(purpose), int(index)))
    return np.random.Generator(np.random.Philox(ss))


# ---------------------------------------------------------------------------
# files
# ---------------------------------------------------------------------------


def read_csv(path, *, header: bool = True, delimiter: str = ",") -> tuple[DataMatrix, list[str]]:
    """Read a numeric CSV (rows = members). Returns the data and column names."""
    rows: list[list[float]] = []
    names: list[str] = []
    width = None
    with open(path, newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh, delimiter=delimiter), start=1):
            if not rec or all(not c.strip() for c in rec):
                continue
            if header and not names and not rows:
                names = [c.strip() for c in rec]
                width = len(names)
                continue
            if width is None:
                width = len(rec)
            if len(rec) != width:
                raise DataError(f"{path}: line {lineno} has {len(rec)} fields, expected {width}")
            try:
                rows.append([float(c) for c in rec])
            except ValueError:
                raise DataError(f"{path}: line {lineno} has a non-numeric field") from None
    if not rows:
        raise DataError(f"{path}: no data rows")
    if not names:
        names = [f"V{j + 1}" for j in range(width)]
    try:
        return DataMatrix(np.array(rows)), names
    except DataError as e:
        raise DataError(f"{path}: {e}") from None


def write_csv(path, data, names: list[str] | None = None, *, delimiter: str = ",") -> None:
    x = as_data(data)
    names = names or [f"V{j + 1}" for j in range(x.p)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        w.writerow(names)
        for row in x.values:
            w.writerow([repr(float(v)) for v in row])


def read_labels(path) -> Labeling:
    """One cluster id (integer >= 1) or NOISE per non-empty line."""
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            tok = line.strip()
            if not tok:
                continue
            if tok == NOISE_TOKEN:
                out.append(NOISE)
                continue
            try:
                v = int(tok)
            except ValueError:
                raise DataError(f"{path}: line {lineno}: bad label {tok!r}") from None
            if v < 1:
                raise DataError(f"{path}: line {lineno}: cluster ids must be >= 1")
            out.append(v)
    if not out:
        raise DataError(f"{path}: no labels")
    return Labeling.from_array(np.array(out), noise=NOISE)


def format_labels(labeling: Labeling) -> str:
    return "".join(
        (NOISE_TOKEN if v == NOISE else str(int(v))) + "\n" for v in as_labeling(labeling).labels
    )


def write_labels(path, labeling: Labeling) -> None:
    Path(path).write_text(format_labels(labeling))
