"""Nonparametric batch statistics: quartiles, Mann-Whitney U, table markers."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

EXACT_MAX_N = 12
# marker for p below each threshold, strictest first
MARKERS = ((0.01, "■"), (0.05, "•"), (0.1, "∘"))
BEST_MARK = "★"


class MWResult(NamedTuple):
    u: float
    p: float


def midranks(values) -> np.ndarray:
    """1-based ranks with tied values sharing their average rank."""
    x = np.asarray(values, dtype=float)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(x.size)
    i = 0
    while i < x.size:
        j = i
        while j + 1 < x.size and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _exact_u_counts(n_a: int, n_b: int) -> np.ndarray:
    """counts[u] = number of rank arrangements giving U_A == u (no ties)."""
    # f[i][j] distribution for i items of A and j of B, built by the usual recurrence
    f = [[None] * (n_b + 1) for _ in range(n_a + 1)]
    for i in range(n_a + 1):
        for j in range(n_b + 1):
            if i == 0 or j == 0:
                f[i][j] = np.array([1], dtype=np.int64)
                continue
            # largest element is from A (contributes j to U_A) or from B
            from_a = np.concatenate([np.zeros(j, dtype=np.int64), f[i - 1][j]])
            from_b = f[i][j - 1]
            size = i * j + 1
            out = np.zeros(size, dtype=np.int64)
            out[: from_a.size] += from_a
            out[: from_b.size] += from_b
            f[i][j] = out
    return f[n_a][n_b]


def _norm_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def mann_whitney_u(sample_a, sample_b, alternative: str = "two-sided", method: str = "auto",
                   continuity: bool = False) -> MWResult:
    """Mann-Whitney U test; returns U for ``sample_a`` and the p-value.

    ``method="auto"`` enumerates the exact null distribution when the pooled
    size is at most 12 and there are no ties, otherwise uses the normal
    approximation with tie-corrected variance. ``alternative="greater"``
    tests whether ``sample_a`` tends to be larger.
    """
    a = np.asarray(sample_a, dtype=float).ravel()
    b = np.asarray(sample_b, dtype=float).ravel()
    n_a, n_b = a.size, b.size
    if n_a == 0 or n_b == 0:
        raise ValueError("both samples must be nonempty")
    if alternative not in ("two-sided", "greater", "less"):
        raise ValueError(f"unknown alternative {alternative!r}")
    pooled = np.concatenate([a, b])
    ranks = midranks(pooled)
    u_a = float(ranks[:n_a].sum() - n_a * (n_a + 1) / 2.0)
    ties = [t for t in Counter(pooled.tolist()).values() if t > 1]
    n = n_a + n_b

    if method == "auto":
        method = "exact" if n <= EXACT_MAX_N and not ties else "normal"
    if method == "exact":
        if ties:
            raise ValueError("exact distribution requires untied samples")
        counts = _exact_u_counts(n_a, n_b)
        total = counts.sum()
        u = int(round(u_a))
        p_le = counts[: u + 1].sum() / total
        p_ge = counts[u:].sum() / total
        p = {"two-sided": min(1.0, 2.0 * min(p_le, p_ge)), "greater": p_ge, "less": p_le}[alternative]
        return MWResult(u_a, float(p))

    mean = n_a * n_b / 2.0
    tie_term = sum(t**3 - t for t in ties) / (n * (n - 1)) if n > 1 else 0.0
    var = n_a * n_b / 12.0 * ((n + 1) - tie_term)
    if var <= 0:
        return MWResult(u_a, 1.0)
    sd = math.sqrt(var)
    cc = 0.5 if continuity else 0.0
    if alternative == "two-sided":
        z = max(abs(u_a - mean) - cc, 0.0) / sd
        p = min(1.0, 2.0 * _norm_sf(z))
    elif alternative == "greater":
        p = _norm_sf((u_a - mean - cc) / sd)
    else:
        p = 1.0 - _norm_sf((u_a - mean + cc) / sd)
    return MWResult(u_a, float(p))


def quartiles(values) -> tuple[float, float, float]:
    """(Q1, median, Q3) with linear interpolation between order statistics."""
    q1, med, q3 = np.quantile(np.asarray(values, dtype=float), [0.25, 0.5, 0.75])
    return float(q1), float(med), float(q3)


@dataclass
class MetricSummary:
    best: float
    median: float
    qd: float
    cqd: float
    p_value: float = math.nan
    mark: str = ""


def summarize(values, maximize: bool) -> MetricSummary:
    v = np.asarray([x for x in values if not math.isnan(x)], dtype=float)
    if v.size == 0:
        return MetricSummary(math.nan, math.nan, math.nan, math.nan)
    q1, med, q3 = quartiles(v)
    qd = (q3 - q1) / 2.0
    cqd = (q3 - q1) / (q3 + q1) if (q3 + q1) > 0 else math.nan
    return MetricSummary(float(v.max() if maximize else v.min()), med, qd, cqd)


def mark_for(p: float) -> str:
    for alpha, symbol in MARKERS:
        if p < alpha:
            return symbol
    return ""


def mark_rows(samples: list, summaries: list, maximize: bool) -> int:
    """Star the best-median row (ties: smaller QD) and mark the rest by MW p-value.

    Updates ``summaries`` in place and returns the index of the starred row.
    """
    valid = [i for i, s in enumerate(summaries) if not math.isnan(s.median)]
    if not valid:
        return -1
    sign = -1.0 if maximize else 1.0
    star = min(valid, key=lambda i: (sign * summaries[i].median, summaries[i].qd, i))
    ref = [x for x in samples[star] if not math.isnan(x)]
    for i, s in enumerate(summaries):
        if i == star:
            s.p_value, s.mark = 1.0, BEST_MARK
            continue
        row = [x for x in samples[i] if not math.isnan(x)]
        if not row:
            continue
        s.p_value = mann_whitney_u(row, ref).p
        s.mark = mark_for(s.p_value)
    return star
