"""Brute-force reference solvers for small instances.

These certify GA output in tests and `--oracle` runs: every feasible knot
configuration (or every one of the 2^p subsets) is scored with the same
objective the GA uses, and all optimizers are returned in lexicographic
order. Enumeration is guarded so a careless call cannot run forever.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, inf

import numpy as np

from .chromosomes import BinaryChromosome, KnotChromosome
from .errors import InfeasibleProblem, TooLarge
from .objectives import (
    KnotObjectiveContext,
    SubsetObjectiveContext,
    knot_ic,
    subset_bic,
)

KNOT_ENUM_GUARD = 10**7
SUBSET_MAX_P = 20


@dataclass
class OracleResult:
    best_score: float
    best_configurations: list
    evaluated_count: int


def _feasible_knot_tuples(grid: np.ndarray, d_min: float, m: int):
    """Yield feasible m-tuples of grid indices in lexicographic order."""
    if m == 0:
        yield ()
        return
    n_u = grid.shape[0]
    lo = grid[0]
    hi = grid[-1]
    # first index beyond the left boundary margin
    start = int(np.searchsorted(grid, lo + d_min, side="right"))
    # next_ok[i]: first index whose value exceeds grid[i] + d_min
    next_ok = np.searchsorted(grid, grid + d_min, side="right")

    def rec(prefix: tuple, first: int):
        if len(prefix) == m:
            yield prefix
            return
        for i in range(first, n_u):
            if not grid[i] < hi - d_min:
                break
            yield from rec(prefix + (i,), int(next_ok[i]))

    yield from rec((), start)


def exhaustive_knot_search(ctx: KnotObjectiveContext, m_range) -> OracleResult:
    """Global minimum of `knot_ic` over all feasible chromosomes.

    `m_range` is an iterable of knot counts. Raises TooLarge when the
    unpruned candidate count exceeds the guard, InfeasibleProblem when no
    feasible configuration exists in the range.
    """
    ms = sorted(set(int(m) for m in m_range))
    if any(m < 0 for m in ms):
        raise InfeasibleProblem("knot counts must be nonnegative")
    n_u = ctx.grid.shape[0]
    bound = sum(comb(n_u, m) for m in ms if m <= n_u)
    if bound > KNOT_ENUM_GUARD:
        raise TooLarge(f"{bound} candidate configurations exceed the {KNOT_ENUM_GUARD} guard")

    best = inf
    winners: list[KnotChromosome] = []
    count = 0
    for m in ms:
        for tau in _feasible_knot_tuples(ctx.grid, ctx.fp.d_min, m):
            c = KnotChromosome(tau)
            count += 1
            v = knot_ic(c, ctx)
            if v < best:
                best = v
                winners = [c]
            elif v == best:
                winners.append(c)
    if not winners:
        raise InfeasibleProblem(f"no feasible configuration with m in {ms}")
    return OracleResult(best_score=best, best_configurations=winners, evaluated_count=count)


def exhaustive_subset_search(ctx: SubsetObjectiveContext) -> OracleResult:
    """Global maximum of `subset_bic` over all 2^p inclusion masks."""
    p = ctx.X.shape[1]
    if p > SUBSET_MAX_P:
        raise TooLarge(f"p={p} exceeds the exhaustive limit of {SUBSET_MAX_P}")
    best = -inf
    winners: list[BinaryChromosome] = []
    shifts = [p - 1 - j for j in range(p)]
    for code in range(1 << p):
        z = BinaryChromosome((code >> s) & 1 for s in shifts)
        v = subset_bic(z, ctx)
        if v > best:
            best = v
            winners = [z]
        elif v == best:
            winners.append(z)
    return OracleResult(
        best_score=best, best_configurations=winners, evaluated_count=1 << p
    )
