"""Comparison validity indices: silhouette (ASW), Dunn, connectivity,
Calinski-Harabasz and the nearest-neighbour classification error rate.

All functions ignore NOISE members. Neighbour orderings break distance
ties by ascending member index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import (
    ComputationError,
    LabelsLike,
    Stream,
    as_data,
    as_labeling,
    check_distance_matrix,
    stream,
)

Orientation = Literal["maximize", "minimize"]

ORIENTATION: dict[str, Orientation] = {
    "rclus": "maximize",
    "asw": "maximize",
    "dunn": "maximize",
    "ch": "maximize",
    "conn": "minimize",
    "nncer": "minimize",
}


@dataclass(frozen=True)
class IndexValue:
    name: str
    value: float

    @property
    def orientation(self) -> Orientation:
        return ORIENTATION[self.name]

    def better_than(self, other: "IndexValue") -> bool:
        if self.orientation == "maximize":
            return self.value > other.value
        return self.value < other.value


def _active(dist, labels: LabelsLike, need_k2: bool = True):
    labeling = as_labeling(labels)
    d = check_distance_matrix(dist)
    if d.shape[0] != labeling.n:
        raise ComputationError(f"{labeling.n} labels for {d.shape[0]} members")
    keep = np.flatnonzero(~labeling.noise_mask)
    if need_k2 and labeling.K < 2:
        raise ComputationError("index undefined for a single cluster")
    return d[np.ix_(keep, keep)], labeling.labels[keep], labeling.K, keep


def _neighbour_order(d: np.ndarray) -> np.ndarray:
    """Row i lists the other members sorted by distance, then by index."""
    n = d.shape[0]
    order = np.argsort(d, axis=1, kind="stable")
    # self sits at distance 0 but may tie with duplicates; drop it explicitly
    out = np.empty((n, n - 1), dtype=np.int64)
    for i in range(n):
        row = order[i]
        out[i] = row[row != i]
    return out


def silhouette_widths(dist, labels: LabelsLike) -> np.ndarray:
    """Per-member (b - a) / max(a, b); singleton-cluster members get 0."""
    d, lab, K, _ = _active(dist, labels)
    n = len(lab)
    sums = np.empty((n, K))
    sizes = np.bincount(lab, minlength=K + 1)[1:]
    for k in range(1, K + 1):
        sums[:, k - 1] = d[:, lab == k].sum(axis=1)
    own = lab - 1
    rows = np.arange(n)
    own_size = sizes[own]
    a = np.where(own_size > 1, sums[rows, own] / np.maximum(own_size - 1, 1), 0.0)
    means = sums / sizes
    means[rows, own] = np.inf
    b = means.min(axis=1)
    top = np.maximum(a, b)
    s = np.where(top > 0, (b - a) / np.where(top > 0, top, 1.0), 0.0)
    s[own_size == 1] = 0.0
    return s


def silhouette_asw(dist, labels: LabelsLike) -> float:
    """Average silhouette width, in [-1, 1]; larger is better."""
    return float(silhouette_widths(dist, labels).mean())


def dunn(dist, labels: LabelsLike) -> float:
    """Smallest between-cluster distance over the largest cluster diameter."""
    d, lab, _, _ = _active(dist, labels)
    same = lab[:, None] == lab[None, :]
    diameter = d[same].max()
    if diameter == 0:
        raise ComputationError("Dunn undefined: zero diameter")
    return float(d[~same].min() / diameter)


def connectivity(dist, labels: LabelsLike, J: int = 10) -> float:
    """Sum over members of 1/j for each j-th nearest neighbour (j <= J)
    lying in another cluster. Lower is better."""
    d, lab, _, _ = _active(dist, labels, need_k2=False)
    n = len(lab)
    if J < 1 or J >= n:
        raise ComputationError(f"connectivity needs 1 <= J < n = {n}, got J = {J}")
    nb = _neighbour_order(d)[:, :J]
    foreign = lab[nb] != lab[:, None]
    return float((foreign / np.arange(1, J + 1)).sum())


def calinski_harabasz(data, labels: LabelsLike, *, squared: bool = True) -> float:
    """Between- over within-cluster dispersion, each per degree of freedom.

    With ``squared=True`` (default) dispersions are sums of squared
    Euclidean distances to the means, the usual variance-ratio form.
    ``squared=False`` uses plain distances instead. Needs coordinates.
    """
    labeling = as_labeling(labels)
    x = as_data(data).values
    if len(x) != labeling.n:
        raise ComputationError(f"{labeling.n} labels for {len(x)} members")
    keep = ~labeling.noise_mask
    x, lab = x[keep], labeling.labels[keep]
    K = labeling.K
    n = len(lab)
    if K < 2:
        raise ComputationError("index undefined for a single cluster")
    if n <= K:
        raise ComputationError("CH undefined: need more members than clusters")

    def size(v):
        sq = (v * v).sum(axis=-1)
        return sq if squared else np.sqrt(sq)

    grand = x.mean(axis=0)
    between = 0.0
    within = 0.0
    for k in range(1, K + 1):
        xk = x[lab == k]
        mk = xk.mean(axis=0)
        between += len(xk) * size(mk - grand)
        within += size(xk - mk).sum()
    if within == 0:
        raise ComputationError("CH undefined: every member sits at its cluster mean")
    return float((between / (K - 1)) / (within / (n - K)))


def nncer_flags(dist, labels: LabelsLike, l: int = 10, seed: int = 0) -> np.ndarray:
    """Per-member 0/1: 1 when the l nearest neighbours outvote the own cluster.

    The own cluster must have strictly more neighbours than any other
    cluster to be accepted; a tie for the lead is settled by a fair coin
    drawn from the member's stream.
    """
    d, lab, K, keep = _active(dist, labels, need_k2=False)
    n = len(lab)
    if l < 1 or l >= n:
        raise ComputationError(f"NNCER needs 1 <= l < n = {n}, got l = {l}")
    nb = _neighbour_order(d)[:, :l]
    flags = np.zeros(n, dtype=np.int64)
    for i in range(n):
        votes = np.bincount(lab[nb[i]], minlength=K + 1)
        mine = votes[lab[i]]
        votes[lab[i]] = -1
        rival = votes.max()
        if mine > rival:
            flags[i] = 0
        elif mine < rival:
            flags[i] = 1
        else:
            flags[i] = int(stream(seed, Stream.NNCER_TIE, int(keep[i])).integers(2))
    return flags


def nncer(dist, labels: LabelsLike, l: int = 10, seed: int = 0) -> float:
    """Fraction of members misclassified by their l nearest neighbours."""
    return float(nncer_flags(dist, labels, l, seed).mean())
