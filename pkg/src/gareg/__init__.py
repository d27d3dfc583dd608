"""Genetic-algorithm search for spline knot placement and best subsets."""

from ._kernels import BACKEND as kernel_backend
from .chromosomes import (
    BinaryChromosome,
    FeasibilityParams,
    KnotChromosome,
    build_grid,
    duplicate_of,
    is_feasible,
)
from .datagen import SubsetSimSpec, sim_knot_data, sim_subset_data
from .engine import (
    FixedKnotCount,
    GAConfig,
    Individual,
    RunTrace,
    SubsetSearch,
    VaryingKnotCount,
    run,
)
from .errors import (
    GaregError,
    Infeasible,
    InfeasibleProblem,
    NonConverged,
    RankDeficient,
    TooLarge,
)
from .islands import IslandConfig, run_islands
from .objectives import (
    KnotObjectiveContext,
    Objective,
    SubsetObjectiveContext,
    knot_context,
    knot_ic,
    knot_objective,
    subset_bic,
    subset_objective,
    wrap_custom,
)
from .oracle import OracleResult, exhaustive_knot_search, exhaustive_subset_search
from .regression import FitResult, GlmFamily, glm_fit, info_criterion, least_squares
from .splines import (
    SplineSpec,
    bspline_basis,
    bspline_design,
    natural_cubic_design,
    place_knots_equal_quantile,
    truncated_power_design,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryChromosome",
    "FeasibilityParams",
    "FitResult",
    "FixedKnotCount",
    "GAConfig",
    "GaregError",
    "GlmFamily",
    "Individual",
    "Infeasible",
    "InfeasibleProblem",
    "IslandConfig",
    "KnotChromosome",
    "KnotObjectiveContext",
    "NonConverged",
    "Objective",
    "OracleResult",
    "RankDeficient",
    "RunTrace",
    "SplineSpec",
    "SubsetObjectiveContext",
    "SubsetSearch",
    "SubsetSimSpec",
    "TooLarge",
    "VaryingKnotCount",
    "build_grid",
    "bspline_basis",
    "bspline_design",
    "duplicate_of",
    "exhaustive_knot_search",
    "exhaustive_subset_search",
    "glm_fit",
    "info_criterion",
    "is_feasible",
    "kernel_backend",
    "knot_context",
    "knot_ic",
    "knot_objective",
    "least_squares",
    "natural_cubic_design",
    "place_knots_equal_quantile",
    "run",
    "run_islands",
    "sim_knot_data",
    "sim_subset_data",
    "subset_bic",
    "subset_objective",
    "truncated_power_design",
    "wrap_custom",
]
