"""Price ingestion and the statistical inputs of the mean-variance model."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DataError(ValueError):
    """Raised when a price file cannot be turned into a valid series."""


@dataclass(frozen=True)
class PriceSeries:
    asset_names: tuple[str, ...]
    prices: np.ndarray  # (months, assets), chronological

    def __post_init__(self):
        p = np.asarray(self.prices, dtype=float)
        if p.ndim != 2:
            raise DataError("prices must be a 2-D matrix")
        if p.shape[0] < 2:
            raise DataError("at least 2 price rows required")
        if p.shape[1] < 2:
            raise DataError("at least 2 assets required")
        if len(self.asset_names) != p.shape[1]:
            raise DataError(
                f"{len(self.asset_names)} asset names for {p.shape[1]} price columns"
            )
        if not np.all(np.isfinite(p)) or np.any(p <= 0):
            r, c = np.argwhere(~(np.isfinite(p) & (p > 0)))[0]
            raise DataError(f"non-positive price at row {r + 1}, column {c + 1}")
        p.setflags(write=False)
        object.__setattr__(self, "prices", p)
        object.__setattr__(self, "asset_names", tuple(self.asset_names))

    @property
    def n_months(self) -> int:
        return self.prices.shape[0]

    @property
    def n_assets(self) -> int:
        return self.prices.shape[1]


@dataclass(frozen=True)
class AssetUniverse:
    mean_returns: np.ndarray
    covariance: np.ndarray
    risk_free_rate: float = 0.0
    asset_names: tuple[str, ...] | None = None

    def __post_init__(self):
        mu = np.array(self.mean_returns, dtype=float)
        cov = np.array(self.covariance, dtype=float)
        if mu.ndim != 1 or cov.shape != (mu.size, mu.size):
            raise DataError(
                f"covariance shape {cov.shape} does not match {mu.size} mean returns"
            )
        if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12):
            raise DataError("covariance matrix is not symmetric")
        if np.any(np.diag(cov) < 0):
            raise DataError("negative variance on the covariance diagonal")
        mu.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean_returns", mu)
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "risk_free_rate", float(self.risk_free_rate))

    @property
    def n(self) -> int:
        return self.mean_returns.size


def load_prices(path, delimiter: str = ",") -> PriceSeries:
    """Read a CSV of monthly closing prices.

    The first row holds asset names; every following row is one month,
    oldest first. Row numbers in error messages count price rows from 1
    (the header is row 0).
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"price file not found: {path}")
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh, delimiter=delimiter) if any(c.strip() for c in r)]
    if not rows:
        raise DataError("empty price file")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if len(body) < 2:
        raise DataError("at least 2 price rows required")
    prices = np.empty((len(body), len(header)))
    for i, row in enumerate(body, start=1):
        if len(row) != len(header):
            raise DataError(f"row {i} has {len(row)} cells, expected {len(header)}")
        for j, cell in enumerate(row):
            try:
                value = float(cell)
            except ValueError:
                raise DataError(f"non-numeric price {cell!r} at row {i}, column {j + 1}") from None
            if not np.isfinite(value) or value <= 0:
                raise DataError(f"non-positive price {cell!r} at row {i}, column {j + 1}")
            prices[i - 1, j] = value
    return PriceSeries(tuple(header), prices)


def to_returns(series: PriceSeries) -> np.ndarray:
    p = series.prices
    return (p[1:] - p[:-1]) / p[:-1]


def build_universe(returns, risk_free_rate: float = 0.0, asset_names=None) -> AssetUniverse:
    """Mean returns and sample covariance (m-1 denominator) of a returns matrix."""
    r = np.asarray(returns, dtype=float)
    if r.ndim != 2 or r.shape[0] < 2:
        raise DataError("covariance needs at least 2 return rows")
    m, n = r.shape
    mean = r.mean(axis=0)
    centred = r - mean
    cov = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            cov[i, j] = cov[j, i] = centred[:, i] @ centred[:, j] / (m - 1)
    return AssetUniverse(mean, cov, risk_free_rate, asset_names)


def universe_from_csv(path, risk_free_rate: float = 0.0, delimiter: str = ",") -> AssetUniverse:
    series = load_prices(path, delimiter)
    return build_universe(to_returns(series), risk_free_rate, series.asset_names)
