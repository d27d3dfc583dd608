"""Island-model wrapper: independent subpopulations with random migration.

Each island is a full steady-state run advancing in lockstep generations.
Every `migration_interval` global generations a random ordered pair of
distinct islands swaps inhabitants: the source's current best is exchanged
with a uniformly chosen non-best member of the destination. A transfer
that would duplicate a chromosome already present in the receiving island
is rejected and the swap partner retained. Islands that hit their stall
limit freeze (so with migration disabled the model is trace-equivalent to
independent runs) but are revived when a migration changes their makeup.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import GAConfig, GARun, RunTrace
from .errors import Infeasible


@dataclass
class IslandConfig:
    n_islands: int = 4
    island_pop: int = 50
    migration_interval: int = 5
    max_mig: int = 100
    migrants_per_event: int = 1

    def __post_init__(self):
        if self.n_islands < 2:
            raise Infeasible("need at least 2 islands")
        if self.island_pop < 3:
            raise Infeasible("island_pop must be >= 3")
        if self.migration_interval < 1:
            raise Infeasible("migration_interval must be >= 1")
        if self.max_mig < 0:
            raise Infeasible("max_mig must be nonnegative")
        if self.migrants_per_event < 1:
            raise Infeasible("migrants_per_event must be >= 1")


def _migrate(islands: list[GARun], isl_cfg: IslandConfig, rng: np.random.Generator) -> bool:
    """One migration event; True iff any exchange actually happened."""
    pair = rng.choice(len(islands), size=2, replace=False)
    src = islands[int(pair[0])]
    dst = islands[int(pair[1])]
    swapped = False
    for _ in range(isl_cfg.migrants_per_event):
        spop, dpop = src.population, dst.population
        s_idx = spop.best_index()
        d_best = dpop.best_index()
        d_candidates = [i for i in range(len(dpop)) if i != d_best]
        d_idx = int(d_candidates[int(rng.integers(0, len(d_candidates)))])
        migrant = spop.chroms[s_idx]
        partner = dpop.chroms[d_idx]
        # incoming duplicates are rejected and the swap partner retained
        if migrant in dpop and partner != migrant:
            continue
        if partner in spop and migrant != partner:
            continue
        mf = float(spop.fitness[s_idx])
        pf = float(dpop.fitness[d_idx])
        spop.replace(s_idx, partner, pf)
        dpop.replace(d_idx, migrant, mf)
        swapped = True
    if swapped:
        src.reset_stall()
        dst.reset_stall()
    return swapped


def run_islands(
    objective,
    mode,
    fp,
    ga_cfg: GAConfig,
    isl_cfg: IslandConfig,
    seed=None,
    monitor=None,
) -> RunTrace:
    """Evolve n_islands subpopulations; return the best across all islands.

    Terminates after max_mig migration events, or when every island is
    done (its own stall limit or max_gen). Child seeds for the islands and
    the migration stream are spawned deterministically from the master
    seed, so results do not depend on scheduling.
    """
    master = np.random.SeedSequence(ga_cfg.seed if seed is None else seed)
    child_seeds = master.spawn(isl_cfg.n_islands + 1)
    mig_rng = np.random.Generator(np.random.PCG64(child_seeds[-1]))

    island_cfg = GAConfig(
        pop_size=isl_cfg.island_pop,
        p_crossover=ga_cfg.p_crossover,
        p_mutation=ga_cfg.p_mutation,
        max_gen=ga_cfg.max_gen,
        stall_limit=ga_cfg.stall_limit,
        restart_cap=ga_cfg.restart_cap,
        seed=ga_cfg.seed,
    )
    islands = [
        GARun(objective, mode, fp, island_cfg, seed=child_seeds[i])
        for i in range(isl_cfg.n_islands)
    ]
    direction = islands[0].evaluate.direction

    best_trace: list[float] = []
    accepted_trace: list[int] = []
    migrations = 0
    global_gen = 0
    while True:
        active = [isl for isl in islands if not isl.done]
        if not active:
            break
        accepted = 0
        for isl in active:
            accepted += isl.advance_generation()
        global_gen += 1
        global_best = min(float(isl.population.fitness.min()) for isl in islands)
        if best_trace:
            global_best = min(global_best, best_trace[-1])
        best_trace.append(global_best)
        accepted_trace.append(accepted)
        if monitor is not None:
            monitor(global_gen, global_best, accepted)
        if (
            migrations < isl_cfg.max_mig
            and global_gen % isl_cfg.migration_interval == 0
        ):
            _migrate(islands, isl_cfg, mig_rng)
            migrations += 1
            if migrations >= isl_cfg.max_mig:
                break

    best_island = min(islands, key=lambda isl: float(isl.population.fitness.min()))
    return RunTrace(
        best_fitness=best_trace,
        accepted=accepted_trace,
        best=best_island.population.best(),
        generations=global_gen,
        direction=direction,
    )
