"""Generate the bundled synthetic 20-fund monthly price file.

84 monthly closes (seven years) from a one-factor model with sector
shocks, so the assets differ in mean, volatility and correlation. The
parameters mimic equity funds: strong common market exposure, modest
idiosyncratic noise, monthly Sharpe ratios of a few tenths.

    python scripts/make_synthetic_prices.py [out.csv]
"""

import csv
import sys
from pathlib import Path

import numpy as np

N_ASSETS = 20
N_MONTHS = 84
SEED = 20102016


def simulate(seed=SEED):
    rng = np.random.default_rng(seed)
    alpha = rng.uniform(-0.002, 0.006, N_ASSETS)
    beta = rng.uniform(0.7, 1.3, N_ASSETS)
    idio = rng.uniform(0.008, 0.03, N_ASSETS)
    sector = rng.integers(0, 4, N_ASSETS)

    market = rng.normal(0.006, 0.04, N_MONTHS - 1)
    sector_shock = rng.normal(0.0, 0.01, (N_MONTHS - 1, 4))
    eps = rng.normal(0.0, 1.0, (N_MONTHS - 1, N_ASSETS)) * idio
    returns = alpha + np.outer(market, beta) + sector_shock[:, sector] + eps
    returns = np.maximum(returns, -0.6)

    start = rng.uniform(500, 20000, N_ASSETS)
    prices = np.vstack([start, start * np.cumprod(1.0 + returns, axis=0)])
    return [f"FUND{i + 1:02d}" for i in range(N_ASSETS)], prices


def main(argv):
    out = Path(argv[1]) if len(argv) > 1 else (
        Path(__file__).resolve().parents[1] / "src" / "epochma" / "data" / "synthetic_20.csv"
    )
    names, prices = simulate()
    with out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in prices:
            w.writerow([f"{p:.4f}" for p in row])
    print(f"wrote {prices.shape[0]} months x {prices.shape[1]} assets to {out}")


if __name__ == "__main__":
    main(sys.argv)
