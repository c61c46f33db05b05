"""Batch orchestration: single runs, shared-reference indicators, sweeps and comparisons."""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

from epochma import engine, indicators, memetic, stats
from epochma.config import Settings
from epochma.engine import EngineConfig
from epochma.indicators import Front
from epochma.market import AssetUniverse, universe_from_csv
from epochma.memetic import EpochWindow

log = logging.getLogger(__name__)

ALGORITHMS = ("ibea", "nsga2", "spea2", "ma")
DISPLAY = {"ibea": "IBEA", "nsga2": "NSGA-II", "spea2": "SPEA2"}
# metric name -> maximise?
METRICS = {"sharpe": True, "hv": True, "gd": False}
OPERATOR_BLOCKS = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0))


@dataclass(frozen=True)
class ExperimentSpec:
    algorithm: str
    engine: EngineConfig
    window: EpochWindow | None = None
    theta: int = 30
    dataset: str | None = None
    risk_free_rate: float = 0.0
    runs: int = 30
    seed_base: int = 0
    delimiter: str = ","

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.algorithm == "ma" and self.window is None:
            raise ValueError("the memetic algorithm needs an epoch window")

    @property
    def label(self) -> str:
        if self.algorithm == "ma":
            return self.window.label
        return DISPLAY[self.algorithm]

    @property
    def slug(self) -> str:
        if self.algorithm == "ma":
            w = self.window
            return f"ma_{w.p_ls:g}_{w.p_em:g}_{w.start_gen}_{w.end_gen}"
        return self.algorithm


@dataclass
class RunResult:
    label: str
    run_index: int
    seed: int
    front: Front
    sharpe_best: float
    evaluations_used: int
    engine_evaluations: int
    ls_evaluations: int
    generations: int
    wall_time: float
    hypervolume: float = math.nan
    gd: float = math.nan
    clipped: int = 0

    def metric(self, name: str) -> float:
        return {"sharpe": self.sharpe_best, "hv": self.hypervolume, "gd": self.gd}[name]


@dataclass
class ReferenceContext:
    front: Front
    point: tuple

    @classmethod
    def from_results(cls, results) -> "ReferenceContext":
        combined = indicators.combine_fronts([r.front for r in results])
        return cls(combined, indicators.reference_point(combined))


@dataclass
class BatchRow:
    spec: ExperimentSpec
    block: str = ""
    results: list = field(default_factory=list)
    summaries: dict = field(default_factory=dict)
    error: str = ""


def make_spec(settings: Settings, algorithm: str, p_ls=None, p_em=None, ig=None, fg=None) -> ExperimentSpec:
    """Build a spec from settings; the memetic run gets the reduced budget."""
    budget = settings.effective_ma_budget if algorithm == "ma" else settings.budget
    cfg = EngineConfig(
        pop_size=settings.pop,
        crossover_rate=settings.px,
        mutation_rate=settings.pm,
        sbx_eta=settings.sbx_eta,
        pm_eta=settings.pm_eta,
        k=settings.k,
        eval_budget=budget,
        seed=settings.seed,
    )
    window = None
    if algorithm == "ma":
        window = EpochWindow(
            settings.ig if ig is None else ig,
            settings.fg if fg is None else fg,
            settings.pls if p_ls is None else p_ls,
            settings.pem if p_em is None else p_em,
            settings.ls_budget,
            settings.ls_share,
        )
        window.check_horizon(settings.horizon)
    return ExperimentSpec(
        algorithm,
        cfg,
        window,
        theta=settings.theta,
        dataset=settings.dataset(),
        risk_free_rate=settings.risk_free,
        runs=settings.runs,
        seed_base=settings.seed,
        delimiter=settings.delimiter,
    )


@lru_cache(maxsize=8)
def _universe(path: str, risk_free_rate: float, delimiter: str) -> AssetUniverse:
    return universe_from_csv(path, risk_free_rate, delimiter)


def spec_universe(spec: ExperimentSpec) -> AssetUniverse:
    if spec.dataset is None:
        raise ValueError("experiment spec has no dataset")
    return _universe(str(spec.dataset), spec.risk_free_rate, spec.delimiter)


def run_one(spec: ExperimentSpec, run_index: int, universe: AssetUniverse | None = None) -> RunResult:
    universe = spec_universe(spec) if universe is None else universe
    seed = spec.seed_base + run_index
    cfg = replace(spec.engine, seed=seed)
    t0 = time.perf_counter()
    if spec.algorithm == "ma":
        pop, _ = memetic.run_memetic(cfg, spec.window, universe, spec.theta)
    else:
        pop = engine.run_engine(spec.algorithm, cfg, universe)
    elapsed = time.perf_counter() - t0
    front = indicators.front_from_portfolios(m.portfolio for m in pop.members)
    best = indicators.select_by_sharpe(front, universe.risk_free_rate)
    return RunResult(
        label=spec.label,
        run_index=run_index,
        seed=seed,
        front=front,
        sharpe_best=best.sharpe,
        evaluations_used=pop.evaluations_used,
        engine_evaluations=pop.engine_evaluations,
        ls_evaluations=pop.ls_evaluations,
        generations=pop.generation,
        wall_time=elapsed,
    )


def _run_task(task):
    spec, idx = task
    try:
        return run_one(spec, idx)
    except Exception as exc:  # reported per cell, the batch continues
        return exc


def run_batch(specs, workers: int = 1) -> list:
    """Run every spec; returns per-spec lists of RunResult, or the exception that aborted it."""
    tasks = [(s, i) for s in specs for i in range(s.runs)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_task, tasks, chunksize=1))
    else:
        outcomes = [_run_task(t) for t in tasks]
    per_spec, pos = [], 0
    for s in specs:
        chunk = outcomes[pos : pos + s.runs]
        pos += s.runs
        err = next((o for o in chunk if isinstance(o, Exception)), None)
        if err is not None:
            log.warning("%s aborted: %s", s.label, err)
        per_spec.append(err if err is not None else chunk)
    return per_spec


def evaluate_batch(results) -> ReferenceContext | None:
    """Fill hypervolume and GD on every run against one combined reference front.

    ``results`` is a list of per-configuration lists; aborted entries
    (exceptions) are skipped.
    """
    flat = [r for group in results if isinstance(group, list) for r in group]
    if not flat:
        return None
    ctx = ReferenceContext.from_results(flat)
    for r in flat:
        r.clipped = indicators.outside_reference(r.front, ctx.point)
        r.hypervolume = indicators.hypervolume(r.front, ctx.point)
        r.gd = indicators.generational_distance(r.front, ctx.front)
    clipped = sum(r.clipped for r in flat)
    if clipped:
        log.info("%d front point(s) outside the reference box were clipped", clipped)
    return ctx


def summarize_rows(rows) -> None:
    """Per-metric statistics and significance markers, starring within each block."""
    for row in rows:
        if row.error:
            continue
        for metric, maximize in METRICS.items():
            row.summaries[metric] = stats.summarize([r.metric(metric) for r in row.results], maximize)
    blocks = {}
    for row in rows:
        if not row.error:
            blocks.setdefault(row.block, []).append(row)
    for members in blocks.values():
        for metric, maximize in METRICS.items():
            samples = [[r.metric(metric) for r in row.results] for row in members]
            stats.mark_rows(samples, [row.summaries[metric] for row in members], maximize)


def execute(specs, blocks=None, workers: int = 1):
    """Run, evaluate against a shared reference and summarise; returns (rows, context)."""
    outcomes = run_batch(specs, workers)
    ctx = evaluate_batch(outcomes)
    rows = []
    for i, (spec, out) in enumerate(zip(specs, outcomes)):
        row = BatchRow(spec, block=blocks[i] if blocks else "")
        if isinstance(out, Exception):
            row.error = f"{type(out).__name__}: {out}"
        else:
            row.results = out
        rows.append(row)
    summarize_rows(rows)
    return rows, ctx


def window_grid(horizon: int = 50, step: int = 10, blocks=OPERATOR_BLOCKS) -> list:
    """(p_ls, p_em, IG, FG) cells: IG < FG on a regular grid, for each operator block."""
    gens = list(range(0, horizon + 1, step))
    return [(pls, pem, ig, fg) for pls, pem in blocks for ig in gens for fg in gens if ig < fg]


def sweep(settings: Settings, cells, workers: int = 1):
    specs = [make_spec(settings, "ma", pls, pem, ig, fg) for pls, pem, ig, fg in cells]
    blocks = [f"P_LS={pls:g},P_EM={pem:g}" for pls, pem, _, _ in cells]
    return execute(specs, blocks, workers)


def compare(specs, workers: int = 1):
    return execute(list(specs), None, workers)


STANDARD_LINEUP = (
    ("ma", 1.0, 0.0, 0, 20),
    ("ma", 1.0, 0.0, 0, 30),
    ("ma", 1.0, 0.0, 0, 40),
    ("ma", 1.0, 1.0, 0, 40),
    ("ma", 1.0, 0.0, 0, 50),
    ("ma", 1.0, 1.0, 20, 30),
    ("nsga2",),
    ("spea2",),
)


def parse_algo(token: str, settings: Settings) -> ExperimentSpec:
    """``ibea``, ``nsga2``, ``spea2``, ``ma`` (window from settings) or ``ma:PLS,PEM,IG,FG``."""
    name, _, params = token.partition(":")
    name = name.strip().lower().replace("-", "")
    name = {"nsgaii": "nsga2"}.get(name, name)
    if name not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {token!r}")
    if name != "ma" or not params:
        return make_spec(settings, name)
    parts = [p.strip() for p in params.split(",")]
    if len(parts) != 4:
        raise ValueError(f"expected ma:PLS,PEM,IG,FG, got {token!r}")
    pls, pem = float(parts[0]), float(parts[1])
    ig, fg = int(parts[2]), int(parts[3])
    return make_spec(settings, "ma", pls, pem, ig, fg)


def default_lineup(settings: Settings) -> list:
    specs = []
    for entry in STANDARD_LINEUP:
        if entry[0] == "ma":
            _, pls, pem, ig, fg = entry
            specs.append(make_spec(settings, "ma", pls, pem, ig, fg))
        else:
            specs.append(make_spec(settings, entry[0]))
    return specs
