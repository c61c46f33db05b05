"""Independent brute-force checks used as test oracles."""

import itertools
import math

import numpy as np


def double_sum_evaluate(mean, cov, w):
    n = len(w)
    var = 0.0
    for i in range(n):
        for j in range(n):
            var += w[i] * w[j] * cov[i][j]
    ret = sum(w[i] * mean[i] for i in range(n))
    return math.sqrt(max(var, 0.0)), ret


def two_pass_variance(xs):
    m = sum(xs) / len(xs)
    return sum((x - m) ** 2 for x in xs) / (len(xs) - 1)


def pairwise_front(points):
    """Distinct nondominated points, O(n^2), sorted by risk."""
    pts = sorted(set(map(tuple, points)))
    keep = []
    for p in pts:
        dominated = any(
            q[0] <= p[0] and q[1] >= p[1] and (q[0] < p[0] or q[1] > p[1]) for q in pts
        )
        if not dominated:
            keep.append(p)
    return sorted(keep)


def grid_hypervolume(points, ref, cells=1000):
    """Count cell centres of a cells x cells grid over the reference box that are dominated."""
    pts = np.asarray(points, dtype=float)
    lo_r = min(pts[:, 0].min(), ref[0])
    hi_r = ref[0]
    lo_m = ref[1]
    hi_m = max(pts[:, 1].max(), ref[1])
    rs = lo_r + (np.arange(cells) + 0.5) * (hi_r - lo_r) / cells
    ms = lo_m + (np.arange(cells) + 0.5) * (hi_m - lo_m) / cells
    R, M = np.meshgrid(rs, ms, indexing="ij")
    covered = np.zeros_like(R, dtype=bool)
    for r, m in pts:
        if r <= ref[0] and m >= ref[1]:
            covered |= (R >= r) & (M <= m)
    return covered.mean() * (hi_r - lo_r) * (hi_m - lo_m)


def nearest_gd(front, reference):
    total = 0.0
    for a in front:
        best = min(math.dist(a, r) for r in reference)
        total += best * best
    return math.sqrt(total) / len(front)


def exact_u_pvalue(a, b):
    """Two-sided permutation p-value of the rank-sum statistic (untied data)."""
    pooled = list(a) + list(b)
    order = sorted(range(len(pooled)), key=lambda i: pooled[i])
    rank = {idx: r + 1 for r, idx in enumerate(order)}
    n_a = len(a)
    observed = sum(rank[i] for i in range(n_a))
    centre = n_a * (len(pooled) + 1) / 2
    dev = abs(observed - centre)
    hits = total = 0
    for combo in itertools.combinations(range(1, len(pooled) + 1), n_a):
        total += 1
        hits += abs(sum(combo) - centre) >= dev - 1e-12
    return hits / total


def sort_interp_quantile(xs, q):
    s = sorted(xs)
    h = (len(s) - 1) * q
    lo = math.floor(h)
    hi = min(lo + 1, len(s) - 1)
    return s[lo] + (h - lo) * (s[hi] - s[lo])


def dominance_ranks(points_min):
    """Front index by repeatedly peeling the nondominated set (minimisation)."""
    remaining = set(range(len(points_min)))
    ranks = {}
    r = 0
    while remaining:
        layer = {
            i for i in remaining
            if not any(
                all(points_min[j][k] <= points_min[i][k] for k in range(2))
                and any(points_min[j][k] < points_min[i][k] for k in range(2))
                for j in remaining
            )
        }
        for i in layer:
            ranks[i] = r
        remaining -= layer
        r += 1
    return [ranks[i] for i in range(len(points_min))]


def pairwise_front_np(points):
    """Vectorised all-pairs variant of pairwise_front for larger sets."""
    P = np.unique(np.asarray(points, dtype=float).reshape(-1, 2), axis=0)
    le = (P[:, None, 0] <= P[None, :, 0]) & (P[:, None, 1] >= P[None, :, 1])
    lt = (P[:, None, 0] < P[None, :, 0]) | (P[:, None, 1] > P[None, :, 1])
    dominated = (le & lt).any(axis=0)
    keep = P[~dominated]
    return [tuple(p) for p in keep[np.argsort(keep[:, 0], kind="stable")].tolist()]


def compressed_hypervolume(points, ref):
    """Exact dominated area by coordinate compression in rational arithmetic."""
    from fractions import Fraction

    pts = [(Fraction(r), Fraction(m)) for r, m in points if r <= ref[0] and m >= ref[1]]
    ref = (Fraction(ref[0]), Fraction(ref[1]))
    xs = sorted({p[0] for p in pts} | {ref[0]})
    ys = sorted({p[1] for p in pts} | {ref[1]})
    area = Fraction(0)
    for x0, x1 in zip(xs, xs[1:]):
        for y0, y1 in zip(ys, ys[1:]):
            if any(r <= x0 and m >= y1 for r, m in pts):
                area += (x1 - x0) * (y1 - y0)
    return area
