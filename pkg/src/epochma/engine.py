"""Real-coded multiobjective evolutionary machinery for the portfolio problem.

Three engines share one variation pipeline (SBX, polynomial mutation,
cardinality repair, evaluation) and differ only in how fitness is assigned
and how the next population is chosen from parents plus offspring:

* IBEA with the additive epsilon indicator,
* NSGA-II (nondominated sorting + crowding distance),
* SPEA2 (strength fitness + k-th nearest neighbour density, archive truncation).

Objectives are (risk, return) with risk minimised and return maximised.
Internally everything runs in minimisation form on (risk, -return).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from epochma import portfolio as pf
from epochma.market import AssetUniverse


@dataclass(frozen=True)
class EngineConfig:
    pop_size: int = 400
    crossover_rate: float = 0.8
    mutation_rate: float = 0.005
    sbx_eta: float = 0.0
    pm_eta: float = 20.0
    k: int = 18
    eval_budget: int = 20_000
    seed: int = 0
    kappa: float = 0.05

    def __post_init__(self):
        if self.pop_size < 2 or self.pop_size % 2:
            raise ValueError("pop_size must be even and >= 2")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.sbx_eta < 0 or self.pm_eta < 0:
            raise ValueError("distribution indices must be nonnegative")
        if self.k < 1:
            raise ValueError("cardinality bound k must be >= 1")
        if self.eval_budget < self.pop_size:
            raise ValueError("eval_budget must cover at least the initial population")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")

    @property
    def max_generations(self) -> int:
        return self.eval_budget // self.pop_size


@dataclass
class Individual:
    genome: np.ndarray
    portfolio: pf.Portfolio
    fitness: object = None

    @property
    def objectives(self) -> pf.ObjectivePoint:
        return self.portfolio.point

    @property
    def sharpe(self) -> float:
        return self.portfolio.sharpe

    def copy(self) -> "Individual":
        return Individual(self.genome.copy(), self.portfolio, self.fitness)


@dataclass
class Population:
    members: list
    generation: int = 0
    engine_evaluations: int = 0
    ls_evaluations: int = 0

    @property
    def evaluations_used(self) -> int:
        return self.engine_evaluations + self.ls_evaluations

    @property
    def size(self) -> int:
        return len(self.members)

    def objective_matrix(self) -> np.ndarray:
        return objective_matrix(self.members)

    def mean_sharpe(self) -> float:
        s = np.array([m.sharpe for m in self.members])
        finite = s[np.isfinite(s)]
        return float(finite.mean()) if finite.size else 0.0


class BudgetExhausted(RuntimeError):
    pass


def objective_matrix(members) -> np.ndarray:
    """(risk, -return) rows, i.e. both columns minimised."""
    return np.array([[m.portfolio.risk, -m.portfolio.ret] for m in members], dtype=float)


def make_individual(genome, universe: AssetUniverse, k: int) -> Individual:
    g = np.asarray(genome, dtype=float)
    if not np.any(g > 0):
        # variation clipped every gene to zero; fall back to equal weights
        g = np.full_like(g, 1.0 / g.size)
    weights = pf.repair(g, k)
    return Individual(g, pf.make_portfolio(universe, weights))


def initialize(config: EngineConfig, universe: AssetUniverse, rng: np.random.Generator) -> Population:
    members = []
    for _ in range(config.pop_size):
        raw = rng.random(universe.n)
        members.append(make_individual(raw / raw.sum(), universe, config.k))
    return Population(members, generation=0, engine_evaluations=config.pop_size)


# -- variation -----------------------------------------------------------------


def sbx_children(p1, p2, u, eta: float):
    """Unclipped SBX children for given uniform draws ``u`` (one per gene)."""
    u = np.asarray(u, dtype=float)
    expo = 1.0 / (eta + 1.0)
    with np.errstate(divide="ignore"):
        beta = np.where(u <= 0.5, (2.0 * u) ** expo, (1.0 / (2.0 * (1.0 - u))) ** expo)
    c1 = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2)
    c2 = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2)
    return c1, c2


def sbx_crossover(p1, p2, eta: float, crossover_rate: float, rng: np.random.Generator):
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if p1.shape != p2.shape:
        raise ValueError("parents must have equal length")
    if crossover_rate <= 0.0 or rng.random() >= crossover_rate:
        return p1.copy(), p2.copy()
    u = rng.random(p1.size)
    # u == 1 would give an infinite spread factor
    u = np.minimum(u, 1.0 - 1e-12)
    apply = rng.random(p1.size) < 0.5
    c1, c2 = sbx_children(p1, p2, u, eta)
    c1 = np.where(apply, c1, p1)
    c2 = np.where(apply, c2, p2)
    return np.clip(c1, 0.0, 1.0), np.clip(c2, 0.0, 1.0)


def polynomial_perturb(x, u, eta: float):
    """Bounded polynomial perturbation of genes ``x`` in [0, 1] with draws ``u``."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    expo = 1.0 / (eta + 1.0)
    lower = u < 0.5
    xy = np.where(lower, 1.0 - x, x)
    val = np.where(
        lower,
        2.0 * u + (1.0 - 2.0 * u) * xy ** (eta + 1.0),
        2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy ** (eta + 1.0),
    )
    delta = np.where(lower, val**expo - 1.0, 1.0 - val**expo)
    return np.clip(x + delta, 0.0, 1.0)


def poly_mutation(genome, eta_m: float, mutation_rate: float, rng: np.random.Generator) -> np.ndarray:
    g = np.asarray(genome, dtype=float)
    mask = rng.random(g.size) < mutation_rate
    u = rng.random(g.size)
    if not mask.any():
        return g.copy()
    return np.where(mask, polynomial_perturb(g, u, eta_m), g)


def make_offspring(
    parents,
    config: EngineConfig,
    universe: AssetUniverse,
    rng: np.random.Generator,
    post: Callable[[Individual], Individual] | None = None,
) -> list:
    """Pairwise SBX + mutation + repair + evaluation; one child per parent slot."""
    children = []
    for a, b in zip(parents[0::2], parents[1::2]):
        g1, g2 = sbx_crossover(a.genome, b.genome, config.sbx_eta, config.crossover_rate, rng)
        for g in (g1, g2):
            g = poly_mutation(g, config.pm_eta, config.mutation_rate, rng)
            child = make_individual(g, universe, config.k)
            if post is not None:
                child = post(child)
            children.append(child)
    return children


def binary_tournament(better: Callable[[int, int], bool], size: int, n: int, rng) -> list:
    """Indices of ``n`` winners of binary tournaments with replacement."""
    pairs = rng.integers(0, size, size=(n, 2))
    return [int(i) if better(int(i), int(j)) else int(j) for i, j in pairs]


# -- IBEA ------------------------------------------------------------------------


def epsilon_matrix(F: np.ndarray) -> np.ndarray:
    """I[i, j] = additive epsilon indicator I_eps+(x_i, x_j) on range-normalised objectives."""
    lo = F.min(axis=0)
    span = F.max(axis=0) - lo
    span[span == 0] = 1.0
    N = (F - lo) / span
    return (N[:, None, :] - N[None, :, :]).max(axis=2)


def ibea_weights(F: np.ndarray, kappa: float) -> np.ndarray:
    """E[i, j] = exp(-I(x_i, x_j) / (c * kappa)) with zero diagonal."""
    I = epsilon_matrix(F)
    c = np.abs(I).max()
    if c == 0:
        c = 1.0
    E = np.exp(-I / (c * kappa))
    np.fill_diagonal(E, 0.0)
    return E


def ibea_fitness(F: np.ndarray, kappa: float = 0.05) -> np.ndarray:
    return -ibea_weights(F, kappa).sum(axis=0)


def ibea_environmental_selection(members, mu: int, kappa: float) -> list:
    F = objective_matrix(members)
    E = ibea_weights(F, kappa)
    fitness = -E.sum(axis=0)
    alive = np.ones(len(members), dtype=bool)
    for _ in range(len(members) - mu):
        worst = int(np.argmin(np.where(alive, fitness, np.inf)))
        alive[worst] = False
        fitness += E[worst]
    survivors = []
    for idx in np.flatnonzero(alive):
        ind = members[idx]
        ind.fitness = float(fitness[idx])
        survivors.append(ind)
    return survivors


def ibea_mating(pop: Population, config: EngineConfig, rng) -> list:
    fitness = ibea_fitness(pop.objective_matrix(), config.kappa)
    for ind, f in zip(pop.members, fitness):
        ind.fitness = float(f)
    idx = binary_tournament(lambda i, j: fitness[i] >= fitness[j], pop.size, config.pop_size, rng)
    return [pop.members[i] for i in idx]


def _check_budget(pop: Population, config: EngineConfig):
    if pop.evaluations_used + config.pop_size > config.eval_budget:
        raise BudgetExhausted(
            f"{pop.evaluations_used} of {config.eval_budget} evaluations used; "
            f"a generation needs {config.pop_size}"
        )


def ibea_step(pop: Population, config: EngineConfig, universe: AssetUniverse, rng) -> Population:
    _check_budget(pop, config)
    parents = ibea_mating(pop, config, rng)
    offspring = make_offspring(parents, config, universe, rng)
    survivors = ibea_environmental_selection(pop.members + offspring, config.pop_size, config.kappa)
    return replace(
        pop,
        members=survivors,
        generation=pop.generation + 1,
        engine_evaluations=pop.engine_evaluations + len(offspring),
    )


# -- NSGA-II ---------------------------------------------------------------------


def nondominated_sort(F: np.ndarray) -> tuple[np.ndarray, list]:
    """Fast nondominated sort for minimisation; returns (ranks, fronts)."""
    n = len(F)
    le = (F[:, None, :] <= F[None, :, :]).all(axis=2)
    lt = (F[:, None, :] < F[None, :, :]).any(axis=2)
    dom = le & lt  # dom[i, j]: i dominates j
    counts = dom.sum(axis=0)
    ranks = np.full(n, -1)
    fronts = []
    current = np.flatnonzero(counts == 0)
    r = 0
    while current.size:
        ranks[current] = r
        fronts.append(current)
        counts = counts - dom[current].sum(axis=0)
        counts[ranks >= 0] = -1
        current = np.flatnonzero(counts == 0)
        r += 1
    return ranks, fronts


def crowding_distance(F: np.ndarray) -> np.ndarray:
    n, m = F.shape
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for k in range(m):
        order = np.argsort(F[:, k], kind="stable")
        lo, hi = F[order[0], k], F[order[-1], k]
        dist[order[0]] = dist[order[-1]] = np.inf
        if hi == lo:
            continue
        gaps = (F[order[2:], k] - F[order[:-2], k]) / (hi - lo)
        dist[order[1:-1]] += gaps
    return dist


def rank_and_crowding(F: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ranks, fronts = nondominated_sort(F)
    crowd = np.zeros(len(F))
    for front in fronts:
        crowd[front] = crowding_distance(F[front])
    return ranks, crowd


def nsga2_environmental_selection(members, mu: int) -> list:
    F = objective_matrix(members)
    ranks, fronts = nondominated_sort(F)
    chosen = []
    crowd_of = {}
    for front in fronts:
        cd = crowding_distance(F[front])
        crowd_of.update(zip(front.tolist(), cd.tolist()))
        if len(chosen) + len(front) <= mu:
            chosen.extend(front.tolist())
        else:
            order = np.argsort(-cd, kind="stable")
            chosen.extend(front[order[: mu - len(chosen)]].tolist())
        if len(chosen) == mu:
            break
    survivors = []
    for idx in chosen:
        ind = members[idx]
        ind.fitness = (int(ranks[idx]), float(crowd_of[idx]))
        survivors.append(ind)
    return survivors


def nsga2_step(pop: Population, config: EngineConfig, universe: AssetUniverse, rng) -> Population:
    _check_budget(pop, config)
    ranks, crowd = rank_and_crowding(pop.objective_matrix())

    def better(i, j):
        if ranks[i] != ranks[j]:
            return ranks[i] < ranks[j]
        return crowd[i] >= crowd[j]

    idx = binary_tournament(better, pop.size, config.pop_size, rng)
    offspring = make_offspring([pop.members[i] for i in idx], config, universe, rng)
    survivors = nsga2_environmental_selection(pop.members + offspring, config.pop_size)
    return replace(
        pop,
        members=survivors,
        generation=pop.generation + 1,
        engine_evaluations=pop.engine_evaluations + len(offspring),
    )


# -- SPEA2 -----------------------------------------------------------------------


def _pairwise_distances(F: np.ndarray) -> np.ndarray:
    diff = F[:, None, :] - F[None, :, :]
    return np.sqrt((diff**2).sum(axis=2))


def spea2_fitness(F: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Returns (raw fitness R, total fitness R + D); lower is better."""
    n = len(F)
    le = (F[:, None, :] <= F[None, :, :]).all(axis=2)
    lt = (F[:, None, :] < F[None, :, :]).any(axis=2)
    dom = le & lt
    strength = dom.sum(axis=1)
    raw = (dom * strength[:, None]).sum(axis=0).astype(float)
    if n < 2:
        return raw, raw + 0.5
    kth = max(1, int(math.sqrt(n)))
    D = _pairwise_distances(F)
    np.fill_diagonal(D, np.inf)
    sigma_k = np.sort(D, axis=1)[:, min(kth, n - 1) - 1]
    return raw, raw + 1.0 / (sigma_k + 2.0)


def spea2_truncate(F: np.ndarray, keep: int) -> np.ndarray:
    """Indices surviving iterative nearest-neighbour truncation down to ``keep``."""
    D = _pairwise_distances(F)
    np.fill_diagonal(D, np.inf)
    alive = np.ones(len(F), dtype=bool)
    while alive.sum() > keep:
        idx = np.flatnonzero(alive)
        sub = np.sort(D[np.ix_(idx, idx)], axis=1)
        # lexicographic minimum over sorted neighbour distances
        victim = idx[np.lexsort(sub.T[::-1])[0]]
        alive[victim] = False
    return np.flatnonzero(alive)


def spea2_environmental_selection(members, mu: int) -> list:
    F = objective_matrix(members)
    _, fit = spea2_fitness(F)
    nondom = np.flatnonzero(fit < 1.0)
    if nondom.size == mu:
        chosen = nondom
    elif nondom.size < mu:
        chosen = np.argsort(fit, kind="stable")[:mu]
    else:
        chosen = nondom[spea2_truncate(F[nondom], mu)]
    survivors = []
    for idx in chosen:
        ind = members[idx]
        ind.fitness = float(fit[idx])
        survivors.append(ind)
    return survivors


def spea2_step(pop: Population, config: EngineConfig, universe: AssetUniverse, rng) -> Population:
    _check_budget(pop, config)
    _, fit = spea2_fitness(pop.objective_matrix())
    idx = binary_tournament(lambda i, j: fit[i] <= fit[j], pop.size, config.pop_size, rng)
    offspring = make_offspring([pop.members[i] for i in idx], config, universe, rng)
    survivors = spea2_environmental_selection(pop.members + offspring, config.pop_size)
    return replace(
        pop,
        members=survivors,
        generation=pop.generation + 1,
        engine_evaluations=pop.engine_evaluations + len(offspring),
    )


STEPS = {"ibea": ibea_step, "nsga2": nsga2_step, "spea2": spea2_step}


def can_step(pop: Population, config: EngineConfig) -> bool:
    return pop.evaluations_used + config.pop_size <= config.eval_budget


def run_engine(
    algorithm: str,
    config: EngineConfig,
    universe: AssetUniverse,
    rng: np.random.Generator | None = None,
    on_generation: Callable[[Population], None] | None = None,
) -> Population:
    """Run a non-memetic engine until the next generation would exceed the budget."""
    step = STEPS[algorithm]
    rng = np.random.default_rng(config.seed) if rng is None else rng
    pop = initialize(config, universe, rng)
    if on_generation:
        on_generation(pop)
    while can_step(pop, config):
        pop = step(pop, config, universe, rng)
        if on_generation:
            on_generation(pop)
    return pop
