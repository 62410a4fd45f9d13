"""Brute-force reference implementations used only by the tests.

Nothing here imports from ``rclus``; each function is a plain loop over
the definition so that it shares no code with the production path.
"""

import math
from fractions import Fraction

import numpy as np


def pairwise_loop(x):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[0] == 1:
        x = x.T
    n = len(x)
    d = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            s = 0.0
            for a, b in zip(x[i], x[j]):
                s += (a - b) * (a - b)
            d[i][j] = math.sqrt(s)
    return np.array(d)


def tied_group_ranks(values):
    """Midranks by sorting and walking tied runs."""
    idx = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    pos = 0
    while pos < len(idx):
        end = pos
        while end + 1 < len(idx) and values[idx[end + 1]] == values[idx[pos]]:
            end += 1
        avg = Fraction(pos + 1 + end + 1, 2)
        for k in range(pos, end + 1):
            ranks[idx[k]] = avg
        pos = end + 1
    return ranks


def spearman_fixed_exact(diff):
    """12 sum((R1 - c)(h - c)) / (N(N^2 - 1)) in exact rationals."""
    N = len(diff)
    r = tied_group_ranks(list(diff))
    c = Fraction(N + 1, 2)
    num = sum((r[h] - c) * (h + 1 - c) for h in range(N))
    return 12 * num / (N * (N * N - 1))


def spearman_pearson(diff):
    """Pearson correlation of midranks with 1..N; 0 if the ranks are constant."""
    N = len(diff)
    r = tied_group_ranks(list(diff))
    mr = sum(r) / N
    mh = Fraction(N + 1, 2)
    sxy = sum((r[h] - mr) * (h + 1 - mh) for h in range(N))
    sxx = sum((r[h] - mr) ** 2 for h in range(N))
    syy = sum((h + 1 - mh) ** 2 for h in range(N))
    if sxx == 0:
        return 0.0
    return float(sxy) / math.sqrt(float(sxx) * float(syy))


def seeded_choice(seed, purpose, member, k):
    """Mirror of the documented stream contract: Philox(SeedSequence(seed,
    spawn_key=(purpose, member))), then integers(k)."""
    ss = np.random.SeedSequence(seed, spawn_key=(purpose, member))
    return int(np.random.Generator(np.random.Philox(ss)).integers(k))


NEAREST, NNCER = 1, 2


def rclus_steps(d, labels, N=10, seed=0, tie_correction=True):
    """Straight-line walk through the five index steps for every member."""
    d = np.asarray(d, dtype=float)
    labels = list(labels)
    n = len(labels)
    members = [i for i in range(n) if labels[i] != 0]
    clusters = sorted(set(labels[i] for i in members))
    scores = []
    for i in members:
        k = labels[i]
        own = [j for j in members if labels[j] == k and j != i]
        if not own:
            scores.append(0.0)
            continue
        # nearest cluster by average distance, random among exact ties
        avgs = {}
        for kk in clusters:
            if kk == k:
                continue
            mem = [j for j in members if labels[j] == kk]
            avgs[kk] = sum(d[i][j] for j in mem) / len(mem)
        lo = min(avgs.values())
        tied = [kk for kk in avgs if avgs[kk] <= lo + 1e-12 * abs(lo)]
        # candidates in order of their lowest member
        tied.sort(key=lambda kk: min(j for j in members if labels[j] == kk))
        nc = tied[seeded_choice(seed, NEAREST, i, len(tied))] if len(tied) > 1 else tied[0]
        # the two distance sets and their joint maximum
        s1 = [d[i][j] for j in own]
        s2 = [d[i][j] for j in members if labels[j] == nc]
        M = max(s1 + s2)
        if M == 0:
            scores.append(0.0)
            continue
        # normalise and count per interval ((h-1)/N, h/N]
        f1 = [0] * N
        f2 = [0] * N
        for target, values in ((f1, s1), (f2, s2)):
            for v in values:
                u = v / M
                if u <= 0:
                    continue
                for h in range(1, N + 1):
                    lo_edge = (h - 1) / N + 1e-7 / N
                    hi_edge = h / N + 1e-7 / N
                    if (h == 1 or u > lo_edge) and u <= hi_edge:
                        target[h - 1] += 1
                        break
        # rank correlation with bin position
        diff = [f2[h] - f1[h] for h in range(N)]
        if tie_correction:
            scores.append(spearman_pearson(diff))
        else:
            scores.append(float(spearman_fixed_exact(diff)))
    # mean over members
    return sum(scores) / len(scores)


def _clusters(labels):
    out = {}
    for i, k in enumerate(labels):
        if k != 0:
            out.setdefault(k, []).append(i)
    return out


def silhouette_loop(d, labels):
    cl = _clusters(labels)
    s = []
    for i, k in enumerate(labels):
        if k == 0:
            continue
        if len(cl[k]) == 1:
            s.append(0.0)
            continue
        a = sum(d[i][j] for j in cl[k] if j != i) / (len(cl[k]) - 1)
        b = min(sum(d[i][j] for j in cl[kk]) / len(cl[kk]) for kk in cl if kk != k)
        s.append(0.0 if max(a, b) == 0 else (b - a) / max(a, b))
    return sum(s) / len(s)


def dunn_loop(d, labels):
    n = len(labels)
    between = math.inf
    within = 0.0
    for i in range(n):
        for j in range(n):
            if labels[i] == 0 or labels[j] == 0 or i == j:
                continue
            if labels[i] == labels[j]:
                within = max(within, d[i][j])
            else:
                between = min(between, d[i][j])
    return between / within


def neighbours_sorted(d, i, members):
    return sorted((j for j in members if j != i), key=lambda j: (d[i][j], j))


def connectivity_loop(d, labels, J=10):
    members = [i for i in range(len(labels)) if labels[i] != 0]
    total = 0.0
    for i in members:
        for j, nb in enumerate(neighbours_sorted(d, i, members)[:J], start=1):
            if labels[nb] != labels[i]:
                total += 1.0 / j
    return total


def ch_loop(x, labels, squared=True):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[0] == 1:
        x = x.T
    cl = _clusters(labels)
    rows = [i for i in range(len(labels)) if labels[i] != 0]
    n, K = len(rows), len(cl)
    p = x.shape[1]
    grand = [sum(x[i][c] for i in rows) / n for c in range(p)]

    def size(u, v):
        s = sum((a - b) ** 2 for a, b in zip(u, v))
        return s if squared else math.sqrt(s)

    num = 0.0
    den = 0.0
    for k, mem in cl.items():
        mean = [sum(x[i][c] for i in mem) / len(mem) for c in range(p)]
        num += len(mem) * size(mean, grand)
        for i in mem:
            den += size(x[i], mean)
    return (num / (K - 1)) / (den / (n - K))


def nncer_loop(d, labels, l=10, seed=0):
    members = [i for i in range(len(labels)) if labels[i] != 0]
    bad = 0
    for i in members:
        votes = {}
        for nb in neighbours_sorted(d, i, members)[:l]:
            votes[labels[nb]] = votes.get(labels[nb], 0) + 1
        mine = votes.get(labels[i], 0)
        rival = max([v for k, v in votes.items() if k != labels[i]], default=0)
        if mine < rival:
            bad += 1
        elif mine == rival:
            bad += seeded_choice(seed, NNCER, i, 2)
    return bad / len(members)


def naive_agglomeration(d, linkage, K):
    """Recompute every inter-group linkage from scratch at each step."""
    n = len(d)
    groups = [[i] for i in range(n)]
    while len(groups) > K:
        best = None
        for a in range(len(groups)):
            for b in range(a + 1, len(groups)):
                pairs = [d[i][j] for i in groups[a] for j in groups[b]]
                v = min(pairs) if linkage == "single" else sum(pairs) / len(pairs)
                key = (v, min(groups[a]), min(groups[b]))
                if best is None or key < best[0]:
                    best = (key, a, b)
        _, a, b = best
        groups[a] = sorted(groups[a] + groups[b])
        del groups[b]
    return sorted(groups)


def exhaustive_two_means(x):
    """Minimum within-cluster sum of squares over all bipartitions."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[0] == 1:
        x = x.T
    n = len(x)
    best = math.inf
    for mask in range(1, 2 ** (n - 1)):
        a = [i for i in range(n) if mask >> i & 1]
        b = [i for i in range(n) if not mask >> i & 1]
        tot = 0.0
        for g in (a, b):
            m = x[g].mean(axis=0)
            tot += float(((x[g] - m) ** 2).sum())
        best = min(best, tot)
    return best


def dbscan_closure(d, eps, min_pts):
    """Clusters as transitive closure of core-core eps links; returns a set of
    frozensets of members plus the noise set."""
    n = len(d)
    core = [sum(1 for j in range(n) if d[i][j] <= eps) >= min_pts for i in range(n)]
    comp = {i: {i} for i in range(n) if core[i]}
    changed = True
    while changed:
        changed = False
        for i in comp:
            for j in comp:
                if i < j and d[i][j] <= eps and comp[i] is not comp[j]:
                    merged = comp[i] | comp[j]
                    for m in merged:
                        comp[m] = merged
                    changed = True
    clusters = {frozenset(s) for s in comp.values()}
    # attach borders to the cluster with the lowest core member
    ordered = sorted(clusters, key=min)
    out = [set(c) for c in ordered]
    noise = set()
    for i in range(n):
        if core[i]:
            continue
        owners = [ci for ci, c in enumerate(ordered) if any(d[i][j] <= eps for j in c)]
        if owners:
            out[min(owners)].add(i)
        else:
            noise.add(i)
    return {frozenset(c) for c in out}, noise
