"""Epoch-gated memetic multiobjective search for cardinality-constrained portfolios."""

from epochma.engine import EngineConfig, Individual, Population
from epochma.market import AssetUniverse, PriceSeries, build_universe, load_prices, to_returns
from epochma.memetic import EliteMemory, EpochWindow, is_active
from epochma.portfolio import ObjectivePoint, Portfolio, dominates, evaluate, repair, sharpe

__version__ = "0.1.0"

__all__ = [
    "AssetUniverse",
    "EliteMemory",
    "EngineConfig",
    "EpochWindow",
    "Individual",
    "ObjectivePoint",
    "Population",
    "Portfolio",
    "PriceSeries",
    "build_universe",
    "dominates",
    "evaluate",
    "is_active",
    "load_prices",
    "repair",
    "sharpe",
    "to_returns",
]
