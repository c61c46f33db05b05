"""Sharpe-driven intensification gated by a generation window.

Between generations ``start_gen`` (inclusive) and ``end_gen`` (exclusive)
the IBEA loop is augmented with two problem-aware operators:

* every mating-selected individual is offered to a bounded elite memory and,
  if its Sharpe index is below the population mean, replaced with probability
  ``p_em`` by a random elite member;
* every offspring undergoes, with probability ``p_ls``, a first-ascent hill
  climb that perturbs one nonzero weight at a time and accepts a neighbour
  only if it beats both the incumbent's Sharpe and the population mean.

Outside the window a memetic generation is exactly an IBEA generation.
Memetic randomness comes from its own generator so the engine's draw
sequence is never disturbed.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, replace

import numpy as np

from epochma import engine
from epochma.engine import EngineConfig, Individual, Population
from epochma.market import AssetUniverse

MEMETIC_STREAM = 0x4D41


@dataclass(frozen=True)
class EpochWindow:
    start_gen: int
    end_gen: int
    p_ls: float = 1.0
    p_em: float = 1.0
    ls_budget: int = 4
    ls_share: float = 0.1

    def __post_init__(self):
        if not 0 <= self.start_gen < self.end_gen:
            raise ValueError(f"need 0 <= IG < FG, got IG={self.start_gen}, FG={self.end_gen}")
        for name in ("p_ls", "p_em"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.ls_budget < 1:
            raise ValueError("ls_budget must be >= 1")
        if not 0.0 <= self.ls_share <= 1.0:
            raise ValueError("ls_share must lie in [0, 1]")

    def ls_allowance(self, pop_size: int) -> int:
        """LS evaluations available in one active generation."""
        return int(round(self.ls_share * pop_size))

    def check_horizon(self, max_generations: int):
        if self.end_gen > max_generations:
            raise ValueError(f"FG={self.end_gen} exceeds the {max_generations}-generation horizon")

    @property
    def label(self) -> str:
        return f"MA^{{{self.p_ls:g},{self.p_em:g}}}_{{{self.start_gen},{self.end_gen}}}"


def is_active(window: EpochWindow, generation: int) -> bool:
    return window.start_gen <= generation < window.end_gen


class EliteMemory:
    """Individuals kept in nonincreasing Sharpe order, at most ``capacity`` of them."""

    def __init__(self, capacity: int = 30):
        if capacity < 1:
            raise ValueError("elite memory capacity must be >= 1")
        self.capacity = capacity
        self.entries: list[Individual] = []

    def __len__(self):
        return len(self.entries)

    @property
    def sharpes(self) -> list:
        return [e.sharpe for e in self.entries]

    def __contains__(self, ind: Individual) -> bool:
        w = ind.portfolio.weights
        return any(np.array_equal(e.portfolio.weights, w) for e in self.entries)

    def offer(self, candidate: Individual) -> bool:
        """Insert ``candidate`` if there is room or it beats the worst entry."""
        if candidate in self:
            return False
        full = len(self.entries) >= self.capacity
        if full and not candidate.sharpe > self.entries[-1].sharpe:
            return False
        if full:
            self.entries.pop()
        # equal Sharpe values keep arrival order
        keys = [-s for s in self.sharpes]
        pos = bisect.bisect_right(keys, -candidate.sharpe)
        self.entries.insert(pos, candidate.copy())
        return True

    def correct(self, selected: Individual, mean_sharpe: float, p_em: float, rng) -> Individual:
        if not self.entries or p_em <= 0.0 or not selected.sharpe < mean_sharpe:
            return selected
        if rng.random() >= p_em:
            return selected
        return self.entries[int(rng.integers(len(self.entries)))].copy()


def local_search(
    seed: Individual,
    universe: AssetUniverse,
    mean_sharpe: float,
    budget: int,
    rng,
    k: int,
    pm_eta: float = 20.0,
) -> tuple[Individual, int]:
    """First-ascent hill climb on the Sharpe index.

    Spends exactly ``budget`` evaluations and returns the final incumbent
    together with the number of evaluations consumed.
    """
    incumbent = seed
    used = 0
    while used < budget:
        w = incumbent.portfolio.weights.copy()
        i = rng.choice(np.flatnonzero(w > 0))
        w[i] = engine.polynomial_perturb(w[i], rng.random(), pm_eta)
        neighbour = engine.make_individual(w, universe, k)
        used += 1
        s = neighbour.sharpe
        if s > incumbent.sharpe and s > mean_sharpe:
            incumbent = neighbour
    return incumbent, used


def memetic_step(
    pop: Population,
    config: EngineConfig,
    window: EpochWindow,
    memory: EliteMemory,
    universe: AssetUniverse,
    rng,
    mrng,
) -> Population:
    engine._check_budget(pop, config)
    if not is_active(window, pop.generation):
        return engine.ibea_step(pop, config, universe, rng)

    mean_sharpe = pop.mean_sharpe()
    parents = engine.ibea_mating(pop, config, rng)
    for i, p in enumerate(parents):
        memory.offer(p)
        parents[i] = memory.correct(p, mean_sharpe, window.p_em, mrng)

    # offspring evaluations are reserved up front; LS only spends what is left
    ls_room = min(
        window.ls_allowance(config.pop_size),
        config.eval_budget - pop.evaluations_used - config.pop_size,
    )
    ls_used = 0

    def improve(child: Individual) -> Individual:
        nonlocal ls_used
        if window.p_ls <= 0.0 or mrng.random() >= window.p_ls:
            return child
        allowance = min(window.ls_budget, ls_room - ls_used)
        if allowance <= 0:
            return child
        child, used = local_search(child, universe, mean_sharpe, allowance, mrng, config.k, config.pm_eta)
        ls_used += used
        return child

    offspring = engine.make_offspring(parents, config, universe, rng, post=improve)
    survivors = engine.ibea_environmental_selection(pop.members + offspring, config.pop_size, config.kappa)
    return replace(
        pop,
        members=survivors,
        generation=pop.generation + 1,
        engine_evaluations=pop.engine_evaluations + len(offspring),
        ls_evaluations=pop.ls_evaluations + ls_used,
    )


def run_memetic(
    config: EngineConfig,
    window: EpochWindow,
    universe: AssetUniverse,
    theta: int = 30,
    on_generation=None,
) -> tuple[Population, EliteMemory]:
    rng = np.random.default_rng(config.seed)
    mrng = np.random.default_rng([config.seed, MEMETIC_STREAM])
    memory = EliteMemory(theta)
    pop = engine.initialize(config, universe, rng)
    if on_generation:
        on_generation(pop)
    while engine.can_step(pop, config):
        pop = memetic_step(pop, config, window, memory, universe, rng, mrng)
        if on_generation:
            on_generation(pop)
    return pop, memory
