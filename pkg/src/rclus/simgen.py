"""Seeded generators for the three simulation designs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .core import DataMatrix, Labeling, Stream, stream


@dataclass(frozen=True, eq=False)
class GeneratedDataset:
    data: DataMatrix
    truth: Labeling
    name: str = ""
    params: dict = field(default_factory=dict)


def _rng(seed: int) -> np.random.Generator:
    return stream(seed, Stream.SIMULATION, 0)


def _truth(sizes) -> Labeling:
    return Labeling(np.repeat(np.arange(1, len(sizes) + 1), sizes))


def gen_univariate_normals(
    sizes=(100, 100, 100), means=(-3.0, 0.0, 3.0), sds=(1.0, 1.0, 1.0), seed: int = 0
) -> GeneratedDataset:
    """Independent normal samples, one group per (size, mean, sd); p = 1."""
    if not len(sizes) == len(means) == len(sds):
        raise ValueError("sizes, means and sds must have equal length")
    if min(sizes) < 1 or min(sds) <= 0:
        raise ValueError("sizes must be positive and sds > 0")
    rng = _rng(seed)
    x = np.concatenate([rng.normal(m, s, n) for n, m, s in zip(sizes, means, sds)])
    return GeneratedDataset(
        DataMatrix(x[:, None]),
        _truth(sizes),
        "univariate-normals",
        {"sizes": list(sizes), "means": list(means), "sds": list(sds), "seed": seed},
    )


@dataclass(frozen=True)
class ShapeLayout:
    """Placement of the four loci used by :func:`gen_four_shapes`.

    ``square`` and ``rectangle`` are (x0, x1, y0, y1) outlines, ``curve``
    is (x0, x1, baseline, amplitude) for one half-period of a sine arc and
    ``circle`` is (cx, cy, radius).
    """

    square: tuple = (0.0, 0.5, 0.0, 0.5)
    rectangle: tuple = (1.0, 1.6, 0.0, 0.3)
    curve: tuple = (0.0, 0.8, 1.0, 0.3)
    circle: tuple = (1.5, 1.2, 0.25)


def _outline(rng, box, n):
    x0, x1, y0, y1 = box
    w, h = x1 - x0, y1 - y0
    s = rng.uniform(0.0, 2 * (w + h), n)
    x = np.select([s < w, s < w + h, s < 2 * w + h], [x0 + s, np.full(n, x1), x1 - (s - w - h)], x0)
    y = np.select([s < w, s < w + h, s < 2 * w + h], [np.full(n, y0), y0 + s - w, np.full(n, y1)], y1 - (s - 2 * w - h))
    return np.column_stack([x, y])


def _sine_arc(x0, x1, base, amp):
    return lambda x: base + amp * np.sin(np.pi * (x - x0) / (x1 - x0))


def _arc(rng, spec, n):
    x0, x1, base, amp = spec
    f = _sine_arc(x0, x1, base, amp)
    # invert the arc-length table so samples are uniform along the curve
    grid = np.linspace(x0, x1, 4097)
    length = np.concatenate([[0.0], np.cumsum(np.hypot(np.diff(grid), np.diff(f(grid))))])
    x = np.interp(rng.uniform(0.0, length[-1], n), length, grid)
    return np.column_stack([x, f(x)])


def _ring(rng, spec, n):
    cx, cy, r = spec
    a = rng.uniform(0.0, 2 * np.pi, n)
    return np.column_stack([cx + r * np.cos(a), cy + r * np.sin(a)])


def gen_four_shapes(
    size_per_group: int = 100,
    noise_sd: float = 0.05,
    seed: int = 0,
    layout: ShapeLayout | None = None,
) -> GeneratedDataset:
    """Uniform points on a square, a rectangle, a sine curve and a circle,
    each coordinate perturbed by N(0, noise_sd). Groups 1..4 in that order."""
    if size_per_group < 1 or noise_sd < 0:
        raise ValueError("size_per_group must be positive and noise_sd >= 0")
    layout = layout or ShapeLayout()
    rng = _rng(seed)
    n = size_per_group
    pts = np.vstack(
        [
            _outline(rng, layout.square, n),
            _outline(rng, layout.rectangle, n),
            _arc(rng, layout.curve, n),
            _ring(rng, layout.circle, n),
        ]
    )
    if noise_sd > 0:
        pts = pts + rng.normal(0.0, noise_sd, pts.shape)
    return GeneratedDataset(
        DataMatrix(pts),
        _truth([n] * 4),
        "four-shapes",
        {"size_per_group": n, "noise_sd": noise_sd, "seed": seed},
    )


def equicorrelation(dim: int, rho: float) -> np.ndarray:
    c = np.full((dim, dim), float(rho))
    np.fill_diagonal(c, 1.0)
    return c


def multivariate_t(rng, n: int, corr: np.ndarray, df: float) -> np.ndarray:
    """Draws of Z / sqrt(chi2_df / df) with Z ~ N(0, corr)."""
    try:
        L = np.linalg.cholesky(corr)
    except np.linalg.LinAlgError:
        raise ValueError("correlation matrix is not positive definite") from None
    z = rng.standard_normal((n, corr.shape[0])) @ L.T
    w = np.sqrt(rng.chisquare(df, n) / df)
    return z / w[:, None]


def t_to_normal(t: np.ndarray, df: float) -> np.ndarray:
    """Map t(df) values to standard normal quantiles, exact in both tails."""
    out = np.empty_like(t)
    lo = t <= 0
    out[lo] = stats.norm.ppf(stats.t.cdf(t[lo], df))
    out[~lo] = stats.norm.isf(stats.t.sf(t[~lo], df))
    return out


def gen_tcopula_highdim(
    sizes=(20, 15, 10),
    dim: int = 100,
    means=(0.0, -3.0, 3.0),
    df: float = 2.0,
    off_diag: float = 0.15,
    seed: int = 0,
) -> GeneratedDataset:
    """Normal margins (sd 1, shifted by each group mean) joined by a t-copula
    with ``df`` degrees of freedom and equicorrelation ``off_diag``."""
    if len(sizes) != len(means):
        raise ValueError("sizes and means must have equal length")
    if not abs(off_diag) < 1 or df <= 0:
        raise ValueError("need |off_diag| < 1 and df > 0")
    corr = equicorrelation(dim, off_diag)
    rng = _rng(seed)
    groups = [t_to_normal(multivariate_t(rng, n, corr, df), df) + m for n, m in zip(sizes, means)]
    return GeneratedDataset(
        DataMatrix(np.vstack(groups)),
        _truth(sizes),
        "tcopula",
        {"sizes": list(sizes), "dim": dim, "means": list(means), "df": df, "off_diag": off_diag, "seed": seed},
    )


GENERATORS = {
    "univariate-normals": gen_univariate_normals,
    "four-shapes": gen_four_shapes,
    "tcopula": gen_tcopula_highdim,
}
