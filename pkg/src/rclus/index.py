"""The rank-correlation cluster validity index R_clus.

For every clustered member the index compares two sets of distances: to
the other members of its own cluster and to the members of its nearest
cluster (smallest average distance). Both sets are scaled by their joint
maximum, histogrammed on N equal-width bins of (0, 1], and the Spearman
correlation between ``f_near - f_own`` and the bin position is taken as
the member's score. R_clus is the mean score; it lies in [-1, 1] and
larger is better.

Worked example (N = 10): a member whose own-cluster distances are
{1, 2} and whose nearest-cluster distance is {4} has M = 4, normalised
sets {0.25, 0.5} and {1.0}, so ``f_own`` has ones in bins 3 and 5 and
``f_near`` a one in bin 10. The differences
(0, 0, -1, 0, -1, 0, 0, 0, 0, 1) are ranked with midranks and
correlated with (1, ..., 10).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .core import (
    NOISE,
    ComputationError,
    LabelsLike,
    Labeling,
    Stream,
    as_labeling,
    check_distance_matrix,
    stream,
)

# Relative slack (in bin widths) when placing a value on a bin edge; a
# ratio such as 0.3/0.6 that rounds to just above 0.5 still lands in the
# bin closed at 0.5.
BOUNDARY_FUZZ = 1e-7
# Relative tolerance for declaring two average distances tied.
TIE_RTOL = 1e-12

ZeroPolicy = Literal["exclude", "first_bin"]


@dataclass(frozen=True)
class BinGrid:
    """N equal intervals (0, 1/N], (1/N, 2/N], ..., ((N-1)/N, 1]."""

    N: int = 10

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"need an integer N >= 2, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))

    @classmethod
    def from_width(cls, w: float) -> "BinGrid":
        if not 0 < w < 1:
            raise ValueError(f"bin width must lie in (0, 1), got {w}")
        N = int(round(1.0 / w))
        if abs(N * w - 1.0) > 1e-9:
            raise ValueError(f"bin width {w} does not divide 1 evenly")
        return cls(N)

    @property
    def w(self) -> float:
        return 1.0 / self.N

    @property
    def midpoints(self) -> np.ndarray:
        return (np.arange(1, self.N + 1) - 0.5) / self.N

    def bin_of(self, values: np.ndarray) -> np.ndarray:
        """1-based bin of each value in [0, 1]; 0 maps to bin 1."""
        v = np.asarray(values, dtype=float)
        h = np.ceil(v * self.N - BOUNDARY_FUZZ)
        return np.clip(h, 1, self.N).astype(np.int64)


def as_grid(grid) -> BinGrid:
    if isinstance(grid, BinGrid):
        return grid
    return BinGrid(int(grid))


@dataclass(frozen=True)
class FrequencyPair:
    f1: np.ndarray  # own cluster
    f2: np.ndarray  # nearest cluster

    @property
    def difference(self) -> np.ndarray:
        return self.f2 - self.f1


@dataclass(frozen=True)
class MemberScore:
    member: int
    cluster: int
    nearest_cluster: int
    scale: float
    freq: FrequencyPair | None
    rho: float


# ---------------------------------------------------------------------------
# per-member steps
# ---------------------------------------------------------------------------


def _cluster_means(dist: np.ndarray, lab: np.ndarray, K: int) -> np.ndarray:
    """avg[i, k-1] = mean distance from member i to the members of cluster k."""
    avg = np.empty((dist.shape[0], K))
    for k in range(1, K + 1):
        idx = np.flatnonzero(lab == k)
        avg[:, k - 1] = dist[:, idx].sum(axis=1) / len(idx)
    return avg


def _first_members(lab: np.ndarray, K: int) -> np.ndarray:
    """Lowest member index of each cluster 1..K (noise ignored)."""
    first = np.full(K, len(lab), dtype=np.int64)
    keep = lab != NOISE
    np.minimum.at(first, lab[keep] - 1, np.flatnonzero(keep))
    return first


def _pick_nearest(avg_row: np.ndarray, own: int, seed: int, member: int, first: np.ndarray) -> int:
    cand_avg = avg_row.copy()
    cand_avg[own - 1] = np.inf
    best = cand_avg.min()
    tied = np.flatnonzero(cand_avg <= best + TIE_RTOL * abs(best))
    if len(tied) == 1:
        return int(tied[0]) + 1
    # order candidates by lowest member, not by id, so renaming clusters
    # cannot change the draw
    tied = tied[np.argsort(first[tied])]
    rng = stream(seed, Stream.NEAREST_TIE, member)
    return int(tied[rng.integers(len(tied))]) + 1


def _require_clusters(labeling: Labeling) -> None:
    if labeling.K < 2:
        raise ComputationError("index undefined for a single cluster")


def nearest_cluster(member: int, dist, labels: LabelsLike, seed: int = 0) -> int:
    """Cluster (other than the member's own) with the smallest mean distance.

    Exact ties are split uniformly at random with a stream keyed by the
    member index; the tied clusters are ordered by their lowest member
    before the draw.
    """
    labeling = as_labeling(labels)
    _require_clusters(labeling)
    lab = labeling.labels
    own = int(lab[member])
    if own == NOISE:
        raise ValueError(f"member {member} is noise")
    d = np.asarray(dist, dtype=float)
    avg = np.empty(labeling.K)
    for k in range(1, labeling.K + 1):
        idx = np.flatnonzero(lab == k)
        avg[k - 1] = d[member, idx].sum() / len(idx)
    return _pick_nearest(avg, own, seed, member, _first_members(lab, labeling.K))


def normalized_distance_sets(member: int, dist, labels: LabelsLike, nc: int):
    """Own-cluster and nearest-cluster distances divided by their joint max.

    Returns ``(s1, s2, M)``. With a singleton own cluster ``s1`` is empty.
    If ``M == 0`` the raw (all-zero) distances are returned unscaled.
    """
    lab = as_labeling(labels).labels
    d = np.asarray(dist, dtype=float)[member]
    own = lab == lab[member]
    own[member] = False
    s1 = d[own]
    s2 = d[lab == nc]
    if len(s2) == 0:
        raise ValueError(f"nearest cluster {nc} is empty")
    M = max(s1.max(initial=0.0), s2.max())
    if M == 0:
        return s1, s2, 0.0
    return s1 / M, s2 / M, float(M)


def bin_frequencies(s1, s2, grid=10, zero: ZeroPolicy = "exclude") -> FrequencyPair:
    """Histogram both normalised sets on the grid.

    ``zero="exclude"`` drops exact zeros (duplicate points), since they lie
    outside (0, 1]; ``zero="first_bin"`` counts them in bin 1.
    """
    grid = as_grid(grid)
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    if (s1.size and (s1.min() < 0 or s1.max() > 1)) or (s2.size and (s2.min() < 0 or s2.max() > 1)):
        raise ValueError("normalised distances must lie in [0, 1]")

    def count(s):
        if zero == "exclude":
            s = s[s > 0]
        elif zero != "first_bin":
            raise ValueError(f"unknown zero policy {zero!r}")
        return np.bincount(grid.bin_of(s) - 1, minlength=grid.N).astype(np.int64), len(s)

    f1, c1 = count(s1)
    f2, c2 = count(s2)
    assert f1.sum() == c1 and f2.sum() == c2, "frequency conservation violated"
    return FrequencyPair(f1, f2)


def midranks(series) -> np.ndarray:
    """Ascending ranks 1..N; tied values share the mean of their ranks.

    Works along the last axis, so a 2-D input is ranked row by row.
    """
    x = np.asarray(series, dtype=float)
    less = (x[..., None, :] < x[..., :, None]).sum(axis=-1)
    equal = (x[..., None, :] == x[..., :, None]).sum(axis=-1)
    return less + (equal + 1) / 2.0


def spearman_trend(diff, tie_correction: bool = True) -> np.ndarray | float:
    """Spearman correlation between ``diff`` and its position 1..N.

    With ``tie_correction`` the midranks are correlated by Pearson's
    formula (the usual tie-corrected coefficient; an all-tied series gives
    0). Without it the midranks go into the no-ties formula
    12 * sum((r - c)(h - c)) / (N (N^2 - 1)), c = (N + 1) / 2.
    Accepts a 1-D series or a 2-D array of series (one per row).
    """
    r = midranks(diff)
    N = r.shape[-1]
    if N < 2:
        raise ValueError("need at least 2 bins")
    c = (N + 1) / 2.0
    rc = r - c
    hc = np.arange(1, N + 1) - c
    num = (rc * hc).sum(axis=-1)
    if tie_correction:
        den = np.sqrt((rc * rc).sum(axis=-1) * (hc * hc).sum())
        with np.errstate(invalid="ignore", divide="ignore"):
            rho = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    else:
        rho = 12.0 * num / (N * (N * N - 1))
    rho = np.clip(rho, -1.0, 1.0)
    return float(rho) if np.ndim(rho) == 0 else rho


def member_rho(freq: FrequencyPair, grid=None, tie_correction: bool = True) -> float:
    d = freq.difference
    if grid is not None and len(d) != as_grid(grid).N:
        raise ValueError("frequency length does not match the grid")
    return spearman_trend(d, tie_correction)


# ---------------------------------------------------------------------------
# the index
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MemberTable:
    """Per-member intermediates in the order of the input rows.

    Noise members are left out; ``member`` holds the original row index.
    Singleton-cluster members have ``nc`` filled in but zero
    frequencies and ``rho = 0``.
    """

    grid: BinGrid
    member: np.ndarray
    cluster: np.ndarray
    position: np.ndarray  # 1-based index m within the cluster
    nc: np.ndarray
    scale: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    rho: np.ndarray
    n_noise: int = 0
    singleton: np.ndarray = field(default_factory=lambda: np.zeros(0, bool))

    @property
    def r_clus(self) -> float:
        return float(self.rho.mean())


def member_table(
    dist,
    labels: LabelsLike,
    grid=10,
    seed: int = 0,
    *,
    tie_correction: bool = True,
    zero: ZeroPolicy = "exclude",
) -> MemberTable:
    """Run every member through the index steps and keep the intermediates."""
    grid = as_grid(grid)
    labeling = as_labeling(labels)
    d_full = check_distance_matrix(dist)
    if d_full.shape[0] != labeling.n:
        raise ComputationError(f"{labeling.n} labels for {d_full.shape[0]} members")
    active = np.flatnonzero(~labeling.noise_mask)
    if len(active) == 0:
        raise ComputationError("all members are noise")
    _require_clusters(labeling)

    d = d_full[np.ix_(active, active)]
    lab = labeling.labels[active]
    K = labeling.K
    n = len(active)
    sizes = np.bincount(lab, minlength=K + 1)
    avg = _cluster_means(d, lab, K)
    first = _first_members(lab, K)
    position = np.empty(n, dtype=np.int64)
    for k in range(1, K + 1):
        idx = np.flatnonzero(lab == k)
        position[idx] = np.arange(1, len(idx) + 1)

    nc = np.empty(n, dtype=np.int64)
    scale = np.zeros(n)
    f1 = np.zeros((n, grid.N), dtype=np.int64)
    f2 = np.zeros((n, grid.N), dtype=np.int64)
    rho = np.zeros(n)
    singleton = sizes[lab] == 1
    for i in range(n):
        nc[i] = _pick_nearest(avg[i], int(lab[i]), seed, int(active[i]), first)
        if singleton[i]:
            # no own-cluster distances to compare against
            continue
        s1, s2, M = normalized_distance_sets(i, d, lab, int(nc[i]))
        scale[i] = M
        if M == 0:
            continue
        fp = bin_frequencies(s1, s2, grid, zero)
        f1[i], f2[i] = fp.f1, fp.f2
        rho[i] = member_rho(fp, grid, tie_correction)
    return MemberTable(
        grid=grid,
        member=active,
        cluster=lab,
        position=position,
        nc=nc,
        scale=scale,
        f1=f1,
        f2=f2,
        rho=rho,
        n_noise=labeling.n_noise,
        singleton=singleton,
    )


def member_scores(dist, labels: LabelsLike, grid=10, seed: int = 0, **kw) -> list[MemberScore]:
    t = member_table(dist, labels, grid, seed, **kw)
    return [
        MemberScore(
            member=int(t.member[i]),
            cluster=int(t.cluster[i]),
            nearest_cluster=int(t.nc[i]),
            scale=float(t.scale[i]),
            freq=None if t.singleton[i] else FrequencyPair(t.f1[i], t.f2[i]),
            rho=float(t.rho[i]),
        )
        for i in range(len(t.member))
    ]


def r_clus(
    dist,
    labels: LabelsLike,
    grid=10,
    seed: int = 0,
    *,
    tie_correction: bool = True,
    zero: ZeroPolicy = "exclude",
) -> float:
    """Mean member score over all non-noise members, in [-1, 1].

    ``grid`` is a :class:`BinGrid` or the number of bins N (w = 1/N).
    Noise members are ignored entirely. Members of singleton clusters
    score 0, as do members at distance 0 from every compared point.
    """
    return member_table(
        dist, labels, grid, seed, tie_correction=tie_correction, zero=zero
    ).r_clus
