"""Fitness functions mapping chromosomes to scalar Q-scores.

`knot_ic` scores a knot configuration by the information criterion of its
spline fit (smaller is better; anything infeasible or degenerate is +inf).
`subset_bic` scores an inclusion mask by the negative BIC of the selected
regression (larger is better; degenerate selections are -inf). The
`Objective` wrapper carries the optimization direction so the minimizing
engine can run either.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .chromosomes import (
    BinaryChromosome,
    FeasibilityParams,
    KnotChromosome,
    build_grid,
    is_feasible,
)
from .errors import Infeasible, NonConverged, RankDeficient
from .regression import GlmFamily, glm_fit, info_criterion, least_squares
from .splines import SplineSpec, design_matrix

logger = logging.getLogger(__name__)


@dataclass
class Objective:
    """A scalar objective plus the direction the engine should optimize."""

    fn: Callable
    direction: str = "min"

    def __call__(self, chromosome) -> float:
        return self.fn(chromosome)


@dataclass(frozen=True, eq=False)
class KnotObjectiveContext:
    """Everything `knot_ic` needs: data, grid, spline spec, and constraints."""

    y: np.ndarray
    grid: np.ndarray
    index_map: np.ndarray
    spec: SplineSpec
    ic_kind: str
    fp: FeasibilityParams
    x_raw: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "y", np.asarray(self.y, dtype=np.float64))
        x_raw = np.ascontiguousarray(self.grid[self.index_map])
        if self.y.shape[0] != x_raw.shape[0]:
            raise Infeasible("y length must match the raw design length")
        object.__setattr__(self, "x_raw", x_raw)


def knot_context(
    y,
    x,
    spec: SplineSpec | None = None,
    ic_kind: str = "BIC",
    d_min: float = 3.0,
    m_max: int | None = None,
) -> KnotObjectiveContext:
    """Build a knot-search context from raw (x, y) data.

    The candidate grid is the sorted unique x values; the spline boundary
    defaults to the data range.
    """
    grid, index_map = build_grid(x)
    spec = spec or SplineSpec()
    if spec.boundary is None:
        spec = SplineSpec(
            basis=spec.basis,
            degree=spec.degree,
            intercept=spec.intercept,
            boundary=(float(grid[0]), float(grid[-1])),
        )
    fp = FeasibilityParams(grid=grid, d_min=d_min, m_max=m_max)
    return KnotObjectiveContext(
        y=y, grid=grid, index_map=index_map, spec=spec, ic_kind=ic_kind, fp=fp
    )


def knot_ic(c: KnotChromosome, ctx: KnotObjectiveContext) -> float:
    """Information criterion of the spline fit at the chromosome's knots.

    Infeasible chromosomes and rank-deficient designs score +inf, so the
    engine simply never keeps them.
    """
    if not is_feasible(c, ctx.fp):
        return math.inf
    knots = ctx.grid[list(c.tau)]
    try:
        X = design_matrix(ctx.x_raw, knots, ctx.spec)
        fit = least_squares(X, ctx.y)
        return info_criterion(
            ctx.y.shape[0], fit.rss_or_deviance, X.shape[1], ctx.ic_kind
        )
    except (Infeasible, RankDeficient):
        return math.inf


def knot_objective(ctx: KnotObjectiveContext) -> Objective:
    return Objective(fn=lambda c: knot_ic(c, ctx), direction="min")


@dataclass(frozen=True, eq=False)
class SubsetObjectiveContext:
    """Response, full predictor matrix, family, and intercept policy."""

    y: np.ndarray
    X: np.ndarray
    family: GlmFamily = GlmFamily.gaussian_identity
    fit_intercept: bool = True

    def __post_init__(self):
        y = np.asarray(self.y, dtype=np.float64)
        X = np.asarray(self.X, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise Infeasible(f"dimension mismatch: X {X.shape} vs y {y.shape}")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)


def subset_bic(z: BinaryChromosome, ctx: SubsetObjectiveContext) -> float:
    """Negative BIC of the regression on the selected predictors.

    The complexity count r is the number of selected predictors; the
    intercept (always fitted when `fit_intercept`) is not counted. With
    r = 0 the null model is scored with a zero penalty. Rank-deficient or
    non-convergent selections score -inf.
    """
    sel = z.selected_indices()
    r = len(sel)
    n = ctx.y.shape[0]
    parts = []
    if ctx.fit_intercept:
        parts.append(np.ones((n, 1)))
    if r:
        parts.append(ctx.X[:, sel])
    try:
        if not parts:
            # null model with no intercept: deviance against a zero mean
            rss = float(ctx.y @ ctx.y)
            return -info_criterion(n, rss, 0, "BIC", ctx.family)
        X = parts[0] if len(parts) == 1 else np.hstack(parts)
        if ctx.family is GlmFamily.gaussian_identity:
            fit = least_squares(X, ctx.y)
        else:
            fit = glm_fit(X, ctx.y, ctx.family)
        return -info_criterion(n, fit.rss_or_deviance, r, "BIC", ctx.family)
    except (RankDeficient, NonConverged, Infeasible):
        return -math.inf


def subset_objective(ctx: SubsetObjectiveContext) -> Objective:
    return Objective(fn=lambda z: subset_bic(z, ctx), direction="max")


def refit_subset(z: BinaryChromosome, ctx: SubsetObjectiveContext):
    """Refit the chosen subset; returns (intercept or None, coefficients)."""
    sel = z.selected_indices()
    n = ctx.y.shape[0]
    parts = []
    if ctx.fit_intercept:
        parts.append(np.ones((n, 1)))
    if sel:
        parts.append(ctx.X[:, sel])
    if not parts:
        return None, np.zeros(0)
    X = parts[0] if len(parts) == 1 else np.hstack(parts)
    if ctx.family is GlmFamily.gaussian_identity:
        fit = least_squares(X, ctx.y)
    else:
        fit = glm_fit(X, ctx.y, ctx.family)
    coef = fit.coefficients
    if ctx.fit_intercept:
        return float(coef[0]), coef[1:]
    return None, coef


def wrap_custom(f: Callable, direction: str = "min", extras: dict | None = None) -> Objective:
    """Adapt a user objective f(chromosome, **extras) for the engine.

    Non-finite returns are mapped to the losing sentinel for the active
    direction; an exception from f scores the chromosome as losing and
    logs a warning.
    """
    if direction not in ("min", "max"):
        raise Infeasible(f"direction must be 'min' or 'max', got {direction!r}")
    kwargs = dict(extras or {})
    losing = math.inf if direction == "min" else -math.inf

    def call(chromosome) -> float:
        try:
            v = float(f(chromosome, **kwargs))
        except Exception:
            logger.warning("custom objective raised; scoring %r as losing", chromosome, exc_info=True)
            return losing
        if not math.isfinite(v):
            return losing
        return v

    return Objective(fn=call, direction=direction)
