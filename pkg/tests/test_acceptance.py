"""Acceptance gate. Each test prints one PASS/FAIL line for its criterion;
the lines are repeated in the pytest terminal summary."""

import time

import numpy as np
import pytest

from rclus.baselines import calinski_harabasz, connectivity, dunn, nncer, silhouette_asw
from rclus.clustering import KMeansConfig, hierarchical, kmeans
from rclus.core import euclidean_distances
from rclus.index import midranks, member_table, r_clus, spearman_trend
from rclus.report import RunManifest, run_sweep
from rclus.simgen import gen_tcopula_highdim, gen_univariate_normals

from .oracles import (
    ch_loop,
    connectivity_loop,
    dunn_loop,
    nncer_loop,
    rclus_steps,
    silhouette_loop,
    spearman_fixed_exact,
    spearman_pearson,
    tied_group_ranks,
)

PUBLISHED_CYG = {
    "rclus(w=0.1)": (72.090, 36.702, 37.624, 33.100, 13.983),
    "dunn": (42.975, 24.596, 13.441, 13.126, 15.052),
    "conn": (4.383, 7.312, 10.865, 13.865, 16.760),
    "ch": (27.308, 14.534, 11.623, 8.736, 8.572),
    "nncer": (8.511, 10.638, 12.766, 12.766, 14.894),
}
SCALE = {"rclus(w=0.1)": 100, "dunn": 100, "nncer": 100, "conn": 1, "ch": 1}
SEEDS = range(20)


@pytest.fixture(scope="module", autouse=True)
def warm_jit():
    # first call may compile; timings below measure steady-state work
    kmeans(np.random.default_rng(0).normal(size=(10, 2)), 2)


def test_criterion_1_table_reproduction(criterion):
    t0 = time.perf_counter()
    report = run_sweep(
        RunManifest(dataset="cyg-ob1", algo="hier-single", k_min=2, k_max=6, widths=[0.1], J=10, l=10,
                    indices=["rclus", "dunn", "conn", "ch", "nncer"])
    )
    elapsed = time.perf_counter() - t0
    worst = 0.0
    for col, want in PUBLISHED_CYG.items():
        got = [r.values[col] * SCALE[col] for r in report.rows]
        worst = max(worst, max(abs(a - b) for a, b in zip(got, want)))
    ok = worst <= 0.001 + 1e-9 and elapsed < 1.0
    criterion(1, ok, f"max |diff| = {worst:.2e} (tol 1e-3), {elapsed:.2f} s (< 1 s)")
    assert ok


def argmax_k(values):
    return 2 + int(np.argmax(values))


def test_criterion_2_simulation_one(criterion):
    t0 = time.perf_counter()
    hits = 0
    for s in SEEDS:
        g = gen_univariate_normals(seed=s)
        d = euclidean_distances(g.data)
        vals = [r_clus(d, kmeans(g.data, KMeansConfig(K, seed=s)).labeling) for K in range(2, 7)]
        hits += argmax_k(vals) == 3
    elapsed = time.perf_counter() - t0
    share = hits / len(SEEDS)
    ok = share >= 0.8 and elapsed < 10
    criterion(2, ok, f"argmax K=3 in {hits}/{len(SEEDS)} seeds (need >= 80%), {elapsed:.1f} s (< 10 s)")
    assert ok


def test_criterion_3_simulation_three(criterion):
    t0 = time.perf_counter()
    argmax_hits = 0
    exact_hits = 0
    widths = (0.025, 0.05, 0.1)
    for s in SEEDS:
        g = gen_tcopula_highdim(seed=s)
        d = euclidean_distances(g.data)
        labs = [kmeans(g.data, KMeansConfig(K, seed=s)).labeling for K in range(2, 7)]
        argmax_hits += all(argmax_k([r_clus(d, lab, round(1 / w), s) for lab in labs]) == 3 for w in widths)
        exact_hits += hierarchical(d, "average", 3) == g.truth
    elapsed = time.perf_counter() - t0
    n = len(SEEDS)
    ok = argmax_hits >= 0.7 * n and exact_hits >= 0.7 * n and elapsed < 60
    criterion(
        3, ok,
        f"argmax K=3 for all w in {argmax_hits}/{n}, average linkage exact in {exact_hits}/{n}, {elapsed:.1f} s (< 60 s)",
    )
    assert ok


def random_instance(rng, n_max=12, k_max=4, noise_rate=0.0):
    n = int(rng.integers(4, n_max + 1))
    p = int(rng.integers(1, 4))
    x = rng.normal(size=(n, p))
    if rng.random() < 0.3:
        x = np.round(x)
    K = int(rng.integers(2, min(k_max, n) + 1))
    lab = np.concatenate([np.arange(1, K + 1), rng.integers(1, K + 1, size=n - K)])
    rng.shuffle(lab)
    if noise_rate:
        extra = rng.random(n) < noise_rate
        extra[np.unique(lab, return_index=True)[1]] = False  # keep every cluster populated
        lab = np.where(extra, 0, lab)
    return x, lab


def test_criterion_4_oracle_equivalence(criterion):
    rng = np.random.default_rng(2024)
    worst = 0.0
    checked = 0
    for _ in range(200):
        x, lab = random_instance(rng, noise_rate=0.1)
        d = euclidean_distances(x)
        n_act = int(np.count_nonzero(lab))
        seed = int(rng.integers(0, 2**32))
        J = min(10, n_act - 1)
        pairs = [
            (r_clus(d, lab, 10, seed), rclus_steps(d, lab, 10, seed)),
            (r_clus(d, lab, 10, seed, tie_correction=False), rclus_steps(d, lab, 10, seed, False)),
            (silhouette_asw(d, lab), silhouette_loop(d, lab)),
            (connectivity(d, lab, J), connectivity_loop(d, lab, J)),
            (nncer(d, lab, J, seed), nncer_loop(d, lab, J, seed)),
        ]
        same = (lab[:, None] == lab[None, :]) & (lab[:, None] != 0)
        np.fill_diagonal(same, False)
        if d[same].max(initial=0) > 0:
            pairs.append((dunn(d, lab), dunn_loop(d, lab)))
        try:
            pairs.append((calinski_harabasz(x, lab), ch_loop(x, lab)))
        except Exception:
            pass
        for a, b in pairs:
            tol_scale = max(1.0, abs(b))  # CH is unbounded: compare relative above 1
            worst = max(worst, abs(a - b) / tol_scale)
        checked += len(pairs)
    ok = worst <= 1e-12
    criterion(4, ok, f"{checked} comparisons on 200 instances, max deviation {worst:.1e} (tol 1e-12)")
    assert ok


def test_criterion_5_invariants(criterion):
    rng = np.random.default_rng(77)
    problems = []
    for i in range(1000):
        x, lab = random_instance(rng, n_max=25, k_max=5, noise_rate=0.05 * (i % 2))
        d = euclidean_distances(x)
        t = member_table(d, lab)  # asserts frequency conservation internally
        r = t.r_clus
        s = silhouette_asw(d, lab)
        if not (-1 <= r <= 1 and -1 <= s <= 1):
            problems.append(f"bounds {i}")
        c = float(rng.uniform(1e-3, 1e3))
        if not np.array_equal(member_table(d * c, lab).rho, t.rho):
            problems.append(f"scale {i}")
        K = lab.max()
        perm = np.concatenate([[0], rng.permutation(K) + 1])
        lab2 = perm[lab]
        J = min(5, np.count_nonzero(lab) - 1)
        checks = [
            (r_clus(d, lab2), r),
            (silhouette_asw(d, lab2), s),
            (connectivity(d, lab2, J), connectivity(d, lab, J)),
            (nncer(d, lab2, J), nncer(d, lab, J)),
        ]
        try:
            checks.append((dunn(d, lab2), dunn(d, lab)))
        except Exception:
            pass
        try:
            checks.append((calinski_harabasz(x, lab2), calinski_harabasz(x, lab)))
        except Exception:
            pass
        for a, b in checks:
            if abs(a - b) > 1e-12 * max(1.0, abs(b)):
                problems.append(f"relabel {i}")
    ok = not problems
    criterion(5, ok, f"1000 instances: bounds, bit-identical scaling, relabeling, conservation; {len(problems)} violations")
    assert ok, problems[:5]


def test_criterion_6_direction(criterion):
    # two uniform segments, gap equal to their length
    x = np.concatenate([np.linspace(0, 1, 50), np.linspace(2, 3, 50)])
    separated = r_clus(euclidean_distances(x[:, None]), np.repeat([1, 2], 50))
    # crossed labeling: each member's clustermate sits in the far group
    swapped = r_clus(euclidean_distances([[0.0], [0.01], [100.0], [100.01]]), [1, 2, 1, 2])
    homog = []
    for s in range(50):
        rng = np.random.default_rng(s)
        y = rng.normal(size=(100, 2))
        lab = rng.permutation(np.repeat([1, 2], 50))
        homog.append(r_clus(euclidean_distances(y), lab, seed=s))
    avg = float(np.mean(np.abs(homog)))
    ok = separated >= 0.9 and swapped < 0 and avg <= 0.2
    criterion(6, ok, f"separated {separated:.3f} (>= 0.9), swapped {swapped:.3f} (< 0), homogeneous mean |R| {avg:.3f} (<= 0.2)")
    assert ok


def test_criterion_7_spearman_kernel(criterion):
    rng = np.random.default_rng(7)
    worst = 0.0
    for i in range(1000):
        N = int(rng.integers(2, 41))
        span = 1 if i % 3 == 0 else int(rng.integers(2, 20))  # every third series is tie-heavy
        diff = rng.integers(-span, span + 1, size=N)
        ranks = [float(v) for v in tied_group_ranks(diff.tolist())]
        worst = max(worst, float(np.max(np.abs(midranks(diff) - ranks))))
        worst = max(worst, abs(spearman_trend(diff, False) - float(spearman_fixed_exact(diff.tolist()))))
        worst = max(worst, abs(spearman_trend(diff, True) - spearman_pearson(diff.tolist())))
    ok = worst <= 1e-12
    criterion(7, ok, f"1000 series, max deviation {worst:.1e} (tol 1e-12)")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
