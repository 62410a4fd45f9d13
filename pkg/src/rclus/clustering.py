"""K-means (Hartigan-Wong transfers), agglomerative hierarchical clustering
(single / average linkage) and DBSCAN on a precomputed distance matrix.

All three return :class:`~rclus.core.Labeling` objects with ids numbered
1..K in order of each cluster's lowest member (lowest core for DBSCAN).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numba
import numpy as np

from .core import NOISE, ComputationError, Labeling, Stream, as_data, check_distance_matrix, stream


def _renumber(raw: np.ndarray) -> Labeling:
    """Relabel so that cluster ids follow first appearance; negatives are noise."""
    out = np.zeros(len(raw), dtype=np.int64)
    seen: dict[int, int] = {}
    for i, r in enumerate(raw):
        if r < 0:
            continue
        if r not in seen:
            seen[r] = len(seen) + 1
        out[i] = seen[r]
    return Labeling(out)


# ---------------------------------------------------------------------------
# K-means
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KMeansConfig:
    K: int
    restarts: int = 25
    max_iterations: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.restarts < 1 or self.max_iterations < 1:
            raise ValueError("restarts and max_iterations must be positive")


@dataclass(frozen=True, eq=False)
class KMeansResult:
    labeling: Labeling
    centers: np.ndarray
    objective: float
    iterations: int


@numba.njit(cache=True)
def _hartigan_wong(x, lab, max_iter):
    """Single-point transfer passes until no move lowers the objective.

    Moving x from cluster a (size na) to b (size nb) changes the
    within-cluster sum of squares by
    nb/(nb+1) |x - c_b|^2 - na/(na-1) |x - c_a|^2.
    Returns (centers, counts, objective trace, passes).
    """
    n, p = x.shape
    K = lab.max() + 1
    centers = np.zeros((K, p))
    counts = np.zeros(K, dtype=np.int64)
    for i in range(n):
        counts[lab[i]] += 1
        centers[lab[i]] += x[i]
    for k in range(K):
        centers[k] /= counts[k]
    trace = np.empty(max_iter + 1)
    obj = 0.0
    for i in range(n):
        for j in range(p):
            obj += (x[i, j] - centers[lab[i], j]) ** 2
    trace[0] = obj
    passes = 0
    for it in range(max_iter):
        moved = False
        for i in range(n):
            a = lab[i]
            if counts[a] == 1:
                continue
            da = 0.0
            for j in range(p):
                da += (x[i, j] - centers[a, j]) ** 2
            remove = counts[a] / (counts[a] - 1.0) * da
            best = -1
            best_add = remove
            for k in range(K):
                if k == a:
                    continue
                dk = 0.0
                for j in range(p):
                    dk += (x[i, j] - centers[k, j]) ** 2
                add = counts[k] / (counts[k] + 1.0) * dk
                if add < best_add * (1.0 - 1e-12):
                    best_add = add
                    best = k
            if best >= 0:
                b = best
                for j in range(p):
                    centers[a, j] = (centers[a, j] * counts[a] - x[i, j]) / (counts[a] - 1)
                    centers[b, j] = (centers[b, j] * counts[b] + x[i, j]) / (counts[b] + 1)
                counts[a] -= 1
                counts[b] += 1
                lab[i] = b
                moved = True
        passes = it + 1
        obj = 0.0
        for i in range(n):
            for j in range(p):
                obj += (x[i, j] - centers[lab[i], j]) ** 2
        trace[it + 1] = obj
        if not moved:
            break
    return centers, counts, trace[: passes + 1], passes


def _nearest_center(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)


def kmeans(data, cfg: KMeansConfig | int) -> KMeansResult:
    """Best of ``cfg.restarts`` Hartigan-Wong runs from random member seeds.

    Each restart picks K distinct members as starting centres, assigns
    every point to its closest centre, then applies single-point
    transfers to convergence. A restart whose initial assignment leaves a
    cluster empty is redrawn. The lowest within-cluster sum of squares
    wins (earliest restart on ties).
    """
    if not isinstance(cfg, KMeansConfig):
        cfg = KMeansConfig(int(cfg))
    x = as_data(data).values
    n = len(x)
    K = cfg.K
    if K > n:
        raise ComputationError(f"K = {K} exceeds n = {n}")
    if K == n:
        return KMeansResult(Labeling(np.arange(1, n + 1)), x.copy(), 0.0, 0)

    best = None
    for r in range(cfg.restarts):
        rng = stream(cfg.seed, Stream.KMEANS_INIT, r)
        for _ in range(100):
            start = x[rng.choice(n, K, replace=False)]
            lab = _nearest_center(x, start)
            if len(np.unique(lab)) == K:
                break
        else:
            continue
        lab = lab.astype(np.int64)
        centers, _, trace, passes = _hartigan_wong(x, lab, cfg.max_iterations)
        if np.any(np.diff(trace) > 1e-9 * max(trace[0], 1.0)):
            raise AssertionError("K-means objective increased")
        obj = float(trace[-1])
        if best is None or obj < best[0]:
            best = (obj, lab, centers, passes)
    if best is None:
        raise ComputationError(f"could not seed {K} non-empty clusters")
    obj, lab, centers, passes = best
    labeling = _renumber(lab)
    # reorder centres to match the renumbered ids
    order = [int(lab[labeling.labels == k][0]) for k in range(1, K + 1)]
    return KMeansResult(labeling, centers[order], obj, passes)


def within_ss(data, labels) -> float:
    x = as_data(data).values
    lab = np.asarray(labels.labels if isinstance(labels, Labeling) else labels)
    return float(sum(((x[lab == k] - x[lab == k].mean(axis=0)) ** 2).sum() for k in np.unique(lab)))


# ---------------------------------------------------------------------------
# hierarchical
# ---------------------------------------------------------------------------

LinkageKind = Literal["single", "average"]


@dataclass(frozen=True)
class Merge:
    a: int  # representative (smallest member index) of the first group
    b: int  # representative of the second group, a < b
    height: float
    size: int


def agglomerate(dist, linkage: LinkageKind = "single") -> list[Merge]:
    """Full merge sequence (n - 1 merges).

    Each group is identified by its smallest member index. At every step
    the closest pair of groups merges; exact ties go to the
    lexicographically smallest (a, b). Distances are updated with the
    Lance-Williams rule: min for single, size-weighted mean for average.
    """
    if linkage not in ("single", "average"):
        raise ValueError(f"unknown linkage {linkage!r}")
    d = check_distance_matrix(dist).copy()
    n = d.shape[0]
    size = np.ones(n, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    np.fill_diagonal(d, np.inf)
    merges: list[Merge] = []
    for _ in range(n - 1):
        flat = int(np.argmin(d))
        a, b = divmod(flat, n)
        if a > b:
            a, b = b, a
        h = float(d[a, b])
        if linkage == "single":
            new = np.minimum(d[a], d[b])
        else:
            new = (size[a] * d[a] + size[b] * d[b]) / (size[a] + size[b])
        size[a] += size[b]
        alive[b] = False
        new[~alive] = np.inf
        new[a] = np.inf
        d[a, :] = new
        d[:, a] = new
        d[b, :] = np.inf
        d[:, b] = np.inf
        merges.append(Merge(a, b, h, int(size[a])))
    return merges


def cut(merges: list[Merge], n: int, K: int) -> Labeling:
    """Labels after applying the first n - K merges."""
    if not 1 <= K <= n:
        raise ComputationError(f"need 1 <= K <= n = {n}, got {K}")
    parent = np.arange(n)

    def root(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for m in merges[: n - K]:
        parent[root(m.b)] = root(m.a)
    return _renumber(np.array([root(i) for i in range(n)]))


def hierarchical(dist, linkage: LinkageKind, K: int) -> Labeling:
    d = np.asarray(dist)
    return cut(agglomerate(d, linkage), d.shape[0], K)


# ---------------------------------------------------------------------------
# DBSCAN
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DbscanConfig:
    eps: float
    min_pts: int

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.min_pts < 1:
            raise ValueError("min_pts must be a positive integer")


def dbscan(dist, cfg: DbscanConfig) -> Labeling:
    """Density clustering: cores have >= min_pts members (self included)
    within eps; clusters are eps-connected components of cores; a border
    point joins the lowest-numbered cluster among its cores; the rest is
    NOISE."""
    d = check_distance_matrix(dist)
    n = d.shape[0]
    near = d <= cfg.eps
    core = near.sum(axis=1) >= cfg.min_pts
    raw = np.full(n, -1, dtype=np.int64)
    cid = 0
    for s in range(n):
        if not core[s] or raw[s] >= 0:
            continue
        raw[s] = cid
        todo = [s]
        while todo:
            i = todo.pop()
            for j in np.flatnonzero(near[i] & core):
                if raw[j] < 0:
                    raw[j] = cid
                    todo.append(j)
        cid += 1
    for i in np.flatnonzero(~core):
        owners = raw[near[i] & core]
        if len(owners):
            raw[i] = owners.min()
    # core discovery order already numbers clusters by their lowest core
    out = np.where(raw >= 0, raw + 1, NOISE)
    return Labeling(out)
