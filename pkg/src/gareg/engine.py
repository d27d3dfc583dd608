"""Single-population steady-state genetic algorithm.

One child is bred at a time: linear-rank parent selection, a
constraint-preserving crossover, refresh mutation, then acceptance only if
the child strictly beats the current worst member and duplicates nobody.
A generation is `pop_size` such child attempts, so `max_gen` is comparable
across population sizes; a run stops at `max_gen` generations or after
`stall_limit` generations in a row without a single accepted replacement.

The engine minimizes. Objectives that should be maximized carry a
``direction`` attribute of "max" and are negated internally; traces record
the internal (minimized) sequence, which is non-increasing by construction
and audited on every generation.

Search modes plug in chromosome-specific sampling, crossover, and mutation:
`FixedKnotCount`, `VaryingKnotCount`, and `SubsetSearch`.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .chromosomes import BinaryChromosome, FeasibilityParams, KnotChromosome, is_feasible
from .errors import Infeasible, InfeasibleProblem

STREAM_NAMES = ("init", "selection", "crossover", "mutation")


@dataclass
class GAConfig:
    """Engine controls; defaults mirror the knot-search driver."""

    pop_size: int = 200
    p_crossover: float = 0.9
    p_mutation: float = 0.3
    max_gen: int = 10000
    stall_limit: int = 200
    restart_cap: int = 100
    seed: int | None = None

    def __post_init__(self):
        if self.pop_size < 3:
            raise Infeasible(f"pop_size must be >= 3, got {self.pop_size}")
        for name in ("p_crossover", "p_mutation"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise Infeasible(f"{name} must be in [0, 1], got {v}")
        if self.max_gen < 1:
            raise Infeasible("max_gen must be >= 1")
        if self.stall_limit < 1:
            raise Infeasible("stall_limit must be >= 1")
        if self.restart_cap < 1:
            raise Infeasible("restart_cap must be >= 1")


@dataclass(frozen=True)
class Individual:
    """A chromosome with its evaluated Q-score (smaller is better)."""

    chromosome: object
    fitness: float


@dataclass
class RunTrace:
    """Per-generation record of a run.

    ``best_fitness`` holds the internal (minimized) best score after each
    generation and is non-increasing. For maximization objectives,
    `reported_best` gives the user-direction values.
    """

    best_fitness: list[float] = field(default_factory=list)
    accepted: list[int] = field(default_factory=list)
    best: Individual | None = None
    generations: int = 0
    direction: str = "min"

    def reported_best(self) -> list[float]:
        if self.direction == "max":
            return [-v for v in self.best_fitness]
        return list(self.best_fitness)

    def best_reported_fitness(self) -> float:
        v = self.best.fitness
        return -v if self.direction == "max" else v


def make_streams(seed) -> dict[str, np.random.Generator]:
    """Named RNG streams (init/selection/crossover/mutation) from one seed.

    `seed` may be an int, None, or a numpy SeedSequence; streams are
    spawned so each component is reproducible in isolation.
    """
    if isinstance(seed, np.random.SeedSequence):
        ss = seed
    else:
        ss = np.random.SeedSequence(seed)
    children = ss.spawn(len(STREAM_NAMES))
    return {
        name: np.random.Generator(np.random.PCG64(child))
        for name, child in zip(STREAM_NAMES, children)
    }


def _as_streams(rng) -> dict[str, np.random.Generator]:
    if isinstance(rng, dict):
        return rng
    return {name: rng for name in STREAM_NAMES}


class Population:
    """Fixed-size population with O(1) duplicate checks and cached ranks."""

    __slots__ = ("chroms", "fitness", "_keys", "_cum", "_worst", "_worst_val")

    def __init__(self, chroms, fitness):
        self.chroms = list(chroms)
        self.fitness = np.asarray(fitness, dtype=np.float64)
        if len(self.chroms) != self.fitness.shape[0]:
            raise Infeasible("chromosome/fitness length mismatch")
        self._keys = set(self.chroms)
        if len(self._keys) != len(self.chroms):
            raise Infeasible("population contains duplicate chromosomes")
        self._cum = None
        self._worst = None
        self._worst_val = None

    def __len__(self):
        return len(self.chroms)

    def __iter__(self):
        return iter(self.chroms)

    def __contains__(self, chromosome):
        return chromosome in self._keys

    def individuals(self) -> list[Individual]:
        return [Individual(c, float(f)) for c, f in zip(self.chroms, self.fitness)]

    def best_index(self) -> int:
        return int(np.argmin(self.fitness))

    def best(self) -> Individual:
        i = self.best_index()
        return Individual(self.chroms[i], float(self.fitness[i]))

    def worst_index(self) -> int:
        # earliest index attaining the largest Q
        if self._worst is None:
            self._worst = int(np.argmax(self.fitness))
        return self._worst

    def selection_cum(self) -> np.ndarray:
        """Cumulative linear-rank selection weights, index-aligned.

        Rank 0 goes to the largest Q (ties share the mean of the ranks
        they span) and rank k is drawn with probability 2k/((n-1)n).
        """
        if self._cum is None:
            n = len(self.chroms)
            ranks = rankdata(-self.fitness, method="average") - 1.0
            weights = 2.0 * ranks / ((n - 1) * n)
            cum = np.cumsum(weights)
            cum[-1] = 1.0  # guard against float drift
            self._cum = cum
        return self._cum

    def replace(self, index: int, chromosome, fitness: float) -> None:
        self._keys.discard(self.chroms[index])
        self.chroms[index] = chromosome
        self.fitness[index] = fitness
        self._keys.add(chromosome)
        self._cum = None
        self._worst = None


# ---------------------------------------------------------------------------
# Samplers


def sample_fixed_m(
    fp: FeasibilityParams, m: int, restart_cap: int, rng: np.random.Generator
) -> KnotChromosome:
    """Uniform draw over feasible m-knot configurations.

    Draws m distinct sorted grid indices uniformly and accepts only if all
    spacing and boundary conditions hold; a failed draw is discarded
    entirely and restarted. Uniformity over the feasible set follows from
    rejection sampling of the uniform law on all m-subsets.
    """
    if m == 0:
        return KnotChromosome(())
    n_u = fp.grid.shape[0]
    if m > n_u:
        raise InfeasibleProblem(f"cannot place {m} knots on a grid of {n_u} points")
    for _ in range(restart_cap):
        idx = rng.choice(n_u, size=m, replace=False)
        idx.sort()
        c = KnotChromosome(idx)
        if is_feasible(c, fp):
            return c
    raise InfeasibleProblem(
        f"no feasible {m}-knot configuration in {restart_cap} attempts "
        f"(min spacing {fp.d_min:g} on a {n_u}-point grid)"
    )


def sample_varying_m(
    fp: FeasibilityParams,
    m_max: int | None,
    restart_cap: int,
    rng: np.random.Generator,
) -> KnotChromosome:
    """Draw m uniformly on {0..m_max}, then run the fixed-m sampler once.

    A draw whose spacing cannot be satisfied is discarded and the whole
    procedure restarts (m is redrawn too).
    """
    cap = fp.effective_m_max() if m_max is None else m_max
    n_u = fp.grid.shape[0]
    for _ in range(restart_cap):
        m = int(rng.integers(0, cap + 1))
        if m == 0:
            return KnotChromosome(())
        if m > n_u:
            continue
        idx = rng.choice(n_u, size=m, replace=False)
        idx.sort()
        c = KnotChromosome(idx)
        if is_feasible(c, fp):
            return c
    raise InfeasibleProblem(
        f"no feasible chromosome with m <= {cap} in {restart_cap} attempts"
    )


# ---------------------------------------------------------------------------
# Search modes


class FixedKnotCount:
    """Search over configurations with exactly m interior knots."""

    def __init__(self, m: int):
        if m < 0:
            raise Infeasible("m must be nonnegative")
        self.m = m

    def sample(self, fp, cfg, rng):
        return sample_fixed_m(fp, self.m, cfg.restart_cap, rng)

    def crossover(self, a, b, fp, cfg, rng):
        return crossover_fixed_m(a, b, fp, cfg, rng)

    def mutation_draw(self, child, fp, cfg, rng):
        return sample_fixed_m(fp, child.m, cfg.restart_cap, rng)

    def audit(self, c, fp) -> bool:
        return c.m == self.m and is_feasible(c, fp)


class VaryingKnotCount:
    """Joint search over the knot count and the knot locations."""

    def __init__(self, m_max: int | None = None):
        self.m_max = m_max

    def sample(self, fp, cfg, rng):
        return sample_varying_m(fp, self.m_max, cfg.restart_cap, rng)

    def crossover(self, a, b, fp, cfg, rng):
        return crossover_varying_m(a, b, fp, cfg, rng, m_max=self.m_max)

    def mutation_draw(self, child, fp, cfg, rng):
        return sample_varying_m(fp, self.m_max, cfg.restart_cap, rng)

    def audit(self, c, fp) -> bool:
        return is_feasible(c, fp)


class SubsetSearch:
    """Search over predictor inclusion masks (binary chromosomes).

    Operators follow the common binary-GA defaults: uniform random
    initialization, single-point crossover (one of the two offspring,
    chosen at random), and a single uniformly chosen bit flip as mutation.
    """

    def __init__(self, p: int):
        if p < 1:
            raise Infeasible("p must be >= 1")
        self.p = p

    def sample(self, fp, cfg, rng):
        return BinaryChromosome(rng.integers(0, 2, size=self.p))

    def crossover(self, a, b, fp, cfg, rng):
        if self.p == 1:
            return a if rng.random() < 0.5 else b
        cut = int(rng.integers(1, self.p))
        if rng.random() < 0.5:
            return BinaryChromosome(a.bits[:cut] + b.bits[cut:])
        return BinaryChromosome(b.bits[:cut] + a.bits[cut:])

    def mutation_draw(self, child, fp, cfg, rng):
        j = int(rng.integers(0, self.p))
        bits = list(child.bits)
        bits[j] = 1 - bits[j]
        return BinaryChromosome(bits)

    def audit(self, c, fp) -> bool:
        return c.p == self.p


# ---------------------------------------------------------------------------
# Operators


def init_population(fp, mode, cfg: GAConfig, rng: np.random.Generator) -> list:
    """pop_size distinct feasible chromosomes drawn by the mode's sampler."""
    out: list = []
    seen: set = set()
    for _ in range(cfg.pop_size):
        for _attempt in range(cfg.restart_cap):
            c = mode.sample(fp, cfg, rng)
            if c not in seen:
                break
        else:
            raise InfeasibleProblem(
                "could not fill the population with distinct chromosomes; "
                "pop_size may exceed the number of feasible configurations"
            )
        seen.add(c)
        out.append(c)
    return out


def rank_select_parents(
    population: Population, rng: np.random.Generator
) -> tuple[Individual, Individual]:
    """Two distinct parents by linear-rank selection.

    The first parent is drawn with probability 2k/((n-1)n) for rank k; the
    second is drawn by the same ranked rule renormalized over the
    remaining n-1 members (realized by rejection).
    """
    n = len(population)
    if n < 2:
        raise Infeasible("need at least 2 individuals to select parents")
    cum = population.selection_cum()
    i = int(np.searchsorted(cum, rng.random(), side="right"))
    if n == 2:
        j = 1 - i
    else:
        j = i
        while j == i:
            j = int(np.searchsorted(cum, rng.random(), side="right"))
    chroms, fit = population.chroms, population.fitness
    return (
        Individual(chroms[i], float(fit[i])),
        Individual(chroms[j], float(fit[j])),
    )


def crossover_fixed_m(
    mom: KnotChromosome,
    dad: KnotChromosome,
    fp: FeasibilityParams,
    cfg: GAConfig,
    rng: np.random.Generator,
) -> KnotChromosome:
    """Sequential constraint-preserving crossover for fixed-m chromosomes.

    Position 1 takes either parent's first knot with probability 1/2; each
    later position considers the parents' knots that stay more than d_min
    beyond the child's previous knot, picking uniformly when both qualify
    and restarting from scratch when neither does. Children that clone a
    parent restart too; after `restart_cap` failures the child comes from
    the uniform sampler.
    """
    if mom.m != dad.m:
        raise Infeasible("fixed-m crossover requires parents of equal length")
    m = mom.m
    grid = fp.grid
    d_min = fp.d_min
    mt, dt = mom.tau, dad.tau
    if m > 0:
        for _ in range(cfg.restart_cap):
            child = [mt[0] if rng.random() < 0.5 else dt[0]]
            failed = False
            for i in range(1, m):
                prev_x = grid[child[-1]]
                cands = []
                if grid[mt[i]] - prev_x > d_min:
                    cands.append(mt[i])
                if grid[dt[i]] - prev_x > d_min:
                    cands.append(dt[i])
                if not cands:
                    failed = True
                    break
                if len(cands) == 2:
                    child.append(cands[0] if rng.random() < 0.5 else cands[1])
                else:
                    child.append(cands[0])
            if failed:
                continue
            tau = tuple(child)
            if tau == mt or tau == dt:
                continue
            c = KnotChromosome(tau)
            if not is_feasible(c, fp):
                continue
            return c
    return sample_fixed_m(fp, m, cfg.restart_cap, rng)


def crossover_varying_m(
    mom: KnotChromosome,
    dad: KnotChromosome,
    fp: FeasibilityParams,
    cfg: GAConfig,
    rng: np.random.Generator,
    m_max: int | None = None,
) -> KnotChromosome:
    """Merge-and-thin crossover for varying-m chromosomes.

    The sorted union of the parents' knots is thinned by independent fair
    coins, then repaired left-to-right by dropping any knot that violates
    a boundary condition or the spacing to the last kept knot. Parent
    clones restart; the uniform varying-m sampler is the fallback.
    """
    grid = fp.grid
    d_min = fp.d_min
    lo = grid[0]
    hi = grid[-1]
    union = sorted(set(mom.tau) | set(dad.tau))
    if union:
        for _ in range(cfg.restart_cap):
            kept: list[int] = []
            for idx in union:
                if rng.random() >= 0.5:
                    continue
                xv = grid[idx]
                if not xv > lo + d_min:
                    continue
                if not xv < hi - d_min:
                    continue
                if kept and not xv - grid[kept[-1]] > d_min:
                    continue
                kept.append(idx)
            tau = tuple(kept)
            if tau == mom.tau or tau == dad.tau:
                continue
            return KnotChromosome(tau)
    return sample_varying_m(fp, m_max, cfg.restart_cap, rng)


def mutate(child, mode, fp, cfg: GAConfig, rng: np.random.Generator):
    """With probability p_mutation, replace the child by a fresh draw.

    Knot modes redraw from the initialization sampler (fixed-m keeps the
    same m; varying-m redraws m); subset mode flips one random bit.
    """
    if rng.random() < cfg.p_mutation:
        return mode.mutation_draw(child, fp, cfg, rng)
    return child


# ---------------------------------------------------------------------------
# Evaluation plumbing


class _Evaluator:
    """Memoizing, direction-normalizing wrapper around an objective."""

    __slots__ = ("fn", "direction", "cache", "n_calls")

    def __init__(self, objective):
        self.fn = getattr(objective, "fn", objective)
        self.direction = getattr(objective, "direction", "min")
        if self.direction not in ("min", "max"):
            raise Infeasible(f"objective direction must be 'min' or 'max', got {self.direction!r}")
        self.cache: dict = {}
        self.n_calls = 0

    def __call__(self, chromosome) -> float:
        cached = self.cache.get(chromosome)
        if cached is not None:
            return cached
        self.n_calls += 1
        v = float(self.fn(chromosome))
        if self.direction == "max":
            v = -v
        if math.isnan(v):
            v = math.inf
        self.cache[chromosome] = v
        return v


def _attempt_child(population, evaluate, mode, fp, cfg, streams) -> bool:
    """One steady-state update attempt; True iff a replacement happened."""
    parent_a, parent_b = rank_select_parents(population, streams["selection"])
    if streams["crossover"].random() < cfg.p_crossover:
        child = mode.crossover(
            parent_a.chromosome, parent_b.chromosome, fp, cfg, streams["crossover"]
        )
    else:
        child = (
            parent_a.chromosome
            if parent_a.fitness <= parent_b.fitness
            else parent_b.chromosome
        )
    child = mutate(child, mode, fp, cfg, streams["mutation"])
    f = evaluate(child)
    widx = population.worst_index()
    if f < population.fitness[widx] and child not in population:
        if not mode.audit(child, fp):
            raise RuntimeError(f"operator produced an invalid chromosome: {child!r}")
        population.replace(widx, child, f)
        return True
    return False


def steady_state_step(population, objective, mode, fp, cfg: GAConfig, rng) -> bool:
    """Breed children until one is accepted, up to restart_cap attempts.

    The child replaces the population's worst member only if it strictly
    improves on that member's fitness and duplicates no current member;
    rejected children are discarded and new ones generated independently.
    Returns whether any replacement was accepted.
    """
    streams = _as_streams(rng)
    evaluate = objective if isinstance(objective, _Evaluator) else _Evaluator(objective)
    for _ in range(cfg.restart_cap):
        if _attempt_child(population, evaluate, mode, fp, cfg, streams):
            return True
    return False


# ---------------------------------------------------------------------------
# Run driver


class GARun:
    """Incremental driver: owns the population, streams, and trace.

    `advance_generation` performs pop_size child attempts; the island
    model interleaves several of these between migration events.
    """

    def __init__(self, objective, mode, fp, cfg: GAConfig, seed=None):
        self.mode = mode
        self.fp = fp
        self.cfg = cfg
        self.evaluate = _Evaluator(objective)
        self.streams = make_streams(cfg.seed if seed is None else seed)
        chroms = init_population(fp, mode, cfg, self.streams["init"])
        for c in chroms:
            if not mode.audit(c, fp):
                raise RuntimeError(f"initializer produced an invalid chromosome: {c!r}")
        self.population = Population(chroms, [self.evaluate(c) for c in chroms])
        self.best_trace: list[float] = []
        self.accepted_trace: list[int] = []
        self.stall = 0
        self.generations = 0

    @property
    def done(self) -> bool:
        return self.generations >= self.cfg.max_gen or self.stall >= self.cfg.stall_limit

    def reset_stall(self) -> None:
        self.stall = 0

    def advance_generation(self) -> int:
        pop, ev, mode, fp, cfg, streams = (
            self.population,
            self.evaluate,
            self.mode,
            self.fp,
            self.cfg,
            self.streams,
        )
        accepted = 0
        for _ in range(cfg.pop_size):
            if _attempt_child(pop, ev, mode, fp, cfg, streams):
                accepted += 1
        self.generations += 1
        best = float(pop.fitness.min())
        if self.best_trace and best > self.best_trace[-1]:
            raise RuntimeError("best fitness increased; steady-state invariant broken")
        self.best_trace.append(best)
        self.accepted_trace.append(accepted)
        self.stall = 0 if accepted else self.stall + 1
        return accepted

    def trace(self) -> RunTrace:
        return RunTrace(
            best_fitness=list(self.best_trace),
            accepted=list(self.accepted_trace),
            best=self.population.best(),
            generations=self.generations,
            direction=self.evaluate.direction,
        )


def run(objective, mode, fp, cfg: GAConfig, seed=None, monitor=None) -> RunTrace:
    """Evolve until max_gen generations or stall_limit stalled generations.

    `monitor`, when given, is called as monitor(generation, best_internal,
    accepted) after every generation. Identical seed, config, and data
    produce an identical RunTrace.
    """
    driver = GARun(objective, mode, fp, cfg, seed=seed)
    while not driver.done:
        accepted = driver.advance_generation()
        if monitor is not None:
            monitor(driver.generations, driver.best_trace[-1], accepted)
    return driver.trace()
