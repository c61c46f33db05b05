"""Pareto-front extraction and quality indicators in (risk, return) space.

Risk is minimised and return maximised throughout. Indicator values are
reported raw, in the units of the objectives.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from epochma.portfolio import ObjectivePoint, Portfolio, sharpe

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Front:
    """Mutually nondominated points sorted by ascending risk (and so ascending return)."""

    risk: np.ndarray
    ret: np.ndarray
    portfolios: tuple | None = None

    def __len__(self):
        return self.risk.size

    @property
    def points(self) -> list:
        return [ObjectivePoint(float(r), float(m)) for r, m in zip(self.risk, self.ret)]

    def as_array(self) -> np.ndarray:
        return np.column_stack([self.risk, self.ret]) if len(self) else np.empty((0, 2))

    @classmethod
    def empty(cls) -> "Front":
        return cls(np.empty(0), np.empty(0), ())


def _as_points(points) -> np.ndarray:
    arr = np.asarray([tuple(p) for p in points], dtype=float)
    return arr.reshape(-1, 2)


def nondominated_indices(points) -> np.ndarray:
    """Indices of the nondominated subset, one index per distinct point, risk-sorted."""
    P = _as_points(points)
    if P.shape[0] == 0:
        return np.empty(0, dtype=int)
    # ascending risk, then descending return, then index
    order = np.lexsort((np.arange(len(P)), -P[:, 1], P[:, 0]))
    keep = []
    best_ret = -math.inf
    for i in order:
        if P[i, 1] > best_ret:
            keep.append(i)
            best_ret = P[i, 1]
    return np.array(keep, dtype=int)


def extract_front(points, portfolios=None) -> Front:
    P = _as_points(points)
    idx = nondominated_indices(P)
    if idx.size == 0:
        return Front.empty()
    links = tuple(portfolios[i] for i in idx) if portfolios is not None else None
    return Front(P[idx, 0].copy(), P[idx, 1].copy(), links)


def front_from_portfolios(portfolios) -> Front:
    portfolios = list(portfolios)
    return extract_front([(p.risk, p.ret) for p in portfolios], portfolios)


def combine_fronts(fronts) -> Front:
    points, links, linked = [], [], True
    for f in fronts:
        points.extend(zip(f.risk.tolist(), f.ret.tolist()))
        if f.portfolios is None:
            linked = False
        else:
            links.extend(f.portfolios)
    return extract_front(points, links if linked else None)


def reference_point(front: Front) -> tuple[float, float]:
    """(maximum risk, minimum return) over a front."""
    if len(front) == 0:
        raise ValueError("reference point of an empty front")
    return float(front.risk.max()), float(front.ret.min())


def outside_reference(front: Front, ref) -> int:
    ref_risk, ref_ret = ref
    return int(np.count_nonzero((front.risk > ref_risk) | (front.ret < ref_ret)))


def hypervolume(front: Front, ref) -> float:
    """Exact dominated area between a 2-D front and the reference point."""
    ref_risk, ref_ret = ref
    inside = (front.risk <= ref_risk) & (front.ret >= ref_ret)
    clipped = int(np.count_nonzero(~inside))
    if clipped:
        log.debug("hypervolume: %d point(s) outside the reference box ignored", clipped)
    risk, ret = front.risk[inside], front.ret[inside]
    if risk.size == 0:
        return 0.0
    order = np.argsort(risk, kind="stable")
    risk, ret = risk[order], ret[order]
    area = 0.0
    best = ref_ret
    for i in range(risk.size):
        nxt = risk[i + 1] if i + 1 < risk.size else ref_risk
        best = max(best, ret[i])
        area += (nxt - risk[i]) * (best - ref_ret)
    return float(area)


def generational_distance(front: Front, reference: Front) -> float:
    """sqrt(sum of squared nearest-reference distances) / N; NaN for an empty front."""
    if len(reference) == 0:
        raise ValueError("generational distance needs a nonempty reference front")
    if len(front) == 0:
        return math.nan
    A, R = front.as_array(), reference.as_array()
    d2 = ((A[:, None, :] - R[None, :, :]) ** 2).sum(axis=2).min(axis=1)
    return float(math.sqrt(d2.sum()) / len(A))


def select_by_sharpe(front: Front, risk_free_rate: float = 0.0) -> Portfolio:
    """Front member with the highest Sharpe index; lower risk wins exact ties."""
    if len(front) == 0:
        raise ValueError("cannot select from an empty front")
    if front.portfolios is None:
        raise ValueError("front carries no portfolio links")
    return front.portfolios[best_sharpe_index(front, risk_free_rate)]


def best_sharpe_index(front: Front, risk_free_rate: float = 0.0) -> int:
    s = front_sharpes(front, risk_free_rate)
    # front is risk-sorted, so the first maximiser has the lowest risk
    return int(np.flatnonzero(s == s.max())[0])


def front_sharpes(front: Front, risk_free_rate: float = 0.0) -> np.ndarray:
    return np.array([sharpe(p, risk_free_rate) for p in front.points])


# -- serialisation ---------------------------------------------------------------


def write_front(path, front: Front, risk_free_rate: float | None = 0.0):
    """CSV with header ``risk,ret[,sharpe]``, one point per row, risk-sorted."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        if risk_free_rate is None:
            w.writerow(["risk", "ret"])
            for p in front.points:
                w.writerow([repr(p.risk), repr(p.ret)])
        else:
            w.writerow(["risk", "ret", "sharpe"])
            for p in front.points:
                w.writerow([repr(p.risk), repr(p.ret), repr(sharpe(p, risk_free_rate))])


def read_front(path) -> Front:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        return Front.empty()
    pts = [(float(r["risk"]), float(r["ret"])) for r in rows]
    return extract_front(pts)
