"""Portfolio evaluation, Sharpe index, cardinality repair and Pareto dominance."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from epochma.market import AssetUniverse

ZERO_RISK = 1e-12
SIMPLEX_TOL = 1e-12


class ObjectivePoint(NamedTuple):
    risk: float
    ret: float


@dataclass(frozen=True)
class Portfolio:
    """Repaired weight vector with its cached evaluation."""

    weights: np.ndarray
    risk: float
    ret: float
    sharpe: float

    @property
    def point(self) -> ObjectivePoint:
        return ObjectivePoint(self.risk, self.ret)

    @property
    def support(self) -> int:
        return int(np.count_nonzero(self.weights > 0))


def evaluate(universe: AssetUniverse, weights) -> ObjectivePoint:
    w = np.asarray(weights, dtype=float)
    if w.shape != (universe.n,):
        raise ValueError(f"weight vector of length {w.size} for a {universe.n}-asset universe")
    ret = float(w @ universe.mean_returns)
    var = float(w @ universe.covariance @ w)
    return ObjectivePoint(math.sqrt(max(var, 0.0)), ret)


def sharpe(point: ObjectivePoint, risk_free_rate: float = 0.0) -> float:
    excess = point.ret - risk_free_rate
    if point.risk < ZERO_RISK:
        if abs(excess) < ZERO_RISK:
            return 0.0
        return math.inf if excess > 0 else -math.inf
    return excess / point.risk


def repair(weights, k: int) -> np.ndarray:
    """Keep the k largest positive weights (lowest index wins ties) and renormalise."""
    w = np.asarray(weights, dtype=float)
    if k < 1:
        raise ValueError("cardinality bound k must be >= 1")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    positive = np.flatnonzero(w > 0)
    if positive.size == 0:
        raise ValueError("cannot repair an all-zero weight vector")
    out = np.zeros_like(w)
    if positive.size <= k:
        if abs(w.sum() - 1.0) <= SIMPLEX_TOL:
            return w.copy()
        keep = positive
    else:
        # stable sort on -w keeps lower indices first among equal weights
        keep = np.argsort(-w, kind="stable")[:k]
    out[keep] = w[keep]
    return out / out.sum()


def make_portfolio(universe: AssetUniverse, weights) -> Portfolio:
    w = np.array(weights, dtype=float)
    point = evaluate(universe, w)
    w.setflags(write=False)
    return Portfolio(w, point.risk, point.ret, sharpe(point, universe.risk_free_rate))


def dominates(a, b) -> bool:
    """True iff a is no riskier, earns no less, and is strictly better in one."""
    return (a[0] <= b[0] and a[1] >= b[1]) and (a[0] < b[0] or a[1] > b[1])
