"""Chromosome encodings and feasibility rules.

Knot candidates are tuples of 0-based indices into the sorted unique design
grid; subset candidates are 0/1 inclusion tuples over the predictors. Both
are immutable and hashable so populations can do O(1) duplicate checks.

Minimum spacing (`d_min`) is measured in x-units: consecutive knot values
must differ by more than d_min, the first knot must exceed the left grid
end by more than d_min, and the last must fall short of the right grid end
by more than d_min.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import Infeasible


class KnotChromosome:
    """Interior-knot configuration: strictly increasing grid indices."""

    __slots__ = ("tau", "_hash")

    def __init__(self, tau):
        object.__setattr__(self, "tau", tuple(int(i) for i in tau))
        object.__setattr__(self, "_hash", hash(self.tau))

    def __setattr__(self, name, value):
        raise AttributeError("KnotChromosome is immutable")

    @property
    def m(self) -> int:
        return len(self.tau)

    def __eq__(self, other):
        return isinstance(other, KnotChromosome) and self.tau == other.tau

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"KnotChromosome(tau={self.tau})"


class BinaryChromosome:
    """Inclusion mask over p candidate predictors."""

    __slots__ = ("bits", "_hash")

    def __init__(self, bits):
        b = tuple(int(v) for v in bits)
        if any(v not in (0, 1) for v in b):
            raise Infeasible("bits must be 0 or 1")
        object.__setattr__(self, "bits", b)
        object.__setattr__(self, "_hash", hash(b))

    def __setattr__(self, name, value):
        raise AttributeError("BinaryChromosome is immutable")

    @property
    def p(self) -> int:
        return len(self.bits)

    def selected_indices(self) -> tuple[int, ...]:
        return tuple(j for j, b in enumerate(self.bits) if b)

    def __eq__(self, other):
        return isinstance(other, BinaryChromosome) and self.bits == other.bits

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"BinaryChromosome(bits={self.bits})"


@dataclass(frozen=True, eq=False)
class FeasibilityParams:
    """Spacing constraint, candidate grid, and optional knot-count cap."""

    grid: np.ndarray
    d_min: float = 0.0
    m_max: int | None = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=np.float64)
        if grid.ndim != 1 or grid.shape[0] < 2:
            raise Infeasible("grid must hold at least 2 values")
        if np.any(np.diff(grid) <= 0):
            raise Infeasible("grid must be strictly increasing")
        if self.d_min < 0:
            raise Infeasible("d_min must be nonnegative")
        object.__setattr__(self, "grid", grid)

    def effective_m_max(self) -> int:
        """Cap on the knot count for varying-m sampling.

        Defaults to floor(span / d_min) - 1 when a spacing is set, else
        half the grid size, clamped to the number of interior grid points.
        """
        n_u = self.grid.shape[0]
        if self.m_max is not None:
            cap = self.m_max
        elif self.d_min > 0:
            cap = int(math.floor((self.grid[-1] - self.grid[0]) / self.d_min)) - 1
        else:
            cap = n_u // 2
        return max(0, min(cap, n_u - 2))


def build_grid(x) -> tuple[np.ndarray, np.ndarray]:
    """Sorted unique grid plus the index map back onto the raw values.

    Handles replicated or unordered design points: grid[index_map] equals
    the raw x elementwise.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < 2:
        raise Infeasible("need at least 2 design values")
    grid, index_map = np.unique(x, return_inverse=True)
    if grid.shape[0] < 2:
        raise Infeasible("all design values are equal")
    return grid, index_map


def is_feasible(c: KnotChromosome, fp: FeasibilityParams) -> bool:
    """True iff the chromosome satisfies spacing and boundary constraints.

    The empty chromosome (m = 0) is feasible. All comparisons are strict,
    matching the '> d_min' spacing rule.
    """
    tau = c.tau
    if not tau:
        return True
    grid = fp.grid
    n_u = grid.shape[0]
    d_min = fp.d_min
    if tau[0] < 0 or tau[-1] >= n_u:
        return False
    prev = None
    for idx in tau:
        if prev is not None and idx <= prev:
            return False
        prev = idx
    xs_first = grid[tau[0]]
    xs_last = grid[tau[-1]]
    if not xs_first > grid[0] + d_min:
        return False
    if not xs_last < grid[-1] - d_min:
        return False
    for a, b in zip(tau, tau[1:]):
        if not grid[b] - grid[a] > d_min:
            return False
    return True


def duplicate_of(c, population) -> bool:
    """True iff an identical chromosome already exists in the population.

    `population` may be any container of chromosomes; `Population` objects
    answer this in O(1).
    """
    return c in population
