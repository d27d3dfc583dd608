"""Spline design matrices at given interior knots.

Three families are supported: truncated-power piecewise polynomials
("ppolys"), natural cubic splines ("ns"), and B-splines ("bs"). Builders
return plain 2-D float arrays whose column count is the model's
free-parameter count: m+d+intercept for ppolys, m+d+intercept for bs
(basis-minus-one convention), and m+2 for ns with an intercept.

The B-spline fill is delegated to `gareg._kernels` (compiled when
available); `bspline_basis` is the reference single-point Cox-de Boor
recursion that the kernels are tested against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import bspline_full_matrix, truncated_power_matrix
from .errors import Infeasible

BASIS_KINDS = ("ppolys", "ns", "bs")


@dataclass(frozen=True)
class SplineSpec:
    """Basis family, degree, intercept flag, and boundary interval.

    ``degree`` is required for "ppolys" and "bs" and ignored for "ns"
    (natural cubic is cubic by definition). ``boundary`` of None means
    (min x, max x) of whatever data the design is built on.
    """

    basis: str = "ppolys"
    degree: int = 3
    intercept: bool = True
    boundary: tuple[float, float] | None = None

    def __post_init__(self):
        if self.basis not in BASIS_KINDS:
            raise Infeasible(f"unknown basis {self.basis!r}; expected one of {BASIS_KINDS}")
        if self.basis != "ns" and self.degree < 1:
            raise Infeasible(f"degree must be >= 1 for {self.basis!r}")
        if self.boundary is not None and not self.boundary[0] < self.boundary[1]:
            raise Infeasible("boundary must satisfy x_lo < x_hi")


def _as_vector(x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] == 0:
        raise Infeasible("x must be a nonempty 1-D vector")
    return x


def _check_knots(knots, lo: float, hi: float) -> np.ndarray:
    knots = np.ascontiguousarray(knots, dtype=np.float64)
    if knots.ndim != 1:
        raise Infeasible("knots must be a 1-D vector")
    if knots.size:
        if np.any(np.diff(knots) <= 0):
            raise Infeasible("interior knots must be strictly increasing")
        if knots[0] <= lo or knots[-1] >= hi:
            raise Infeasible(
                f"interior knots must lie strictly inside ({lo:g}, {hi:g})"
            )
    return knots


def _resolve_boundary(x: np.ndarray, boundary) -> tuple[float, float]:
    if boundary is None:
        return float(np.min(x)), float(np.max(x))
    return float(boundary[0]), float(boundary[1])


def truncated_power_design(x, knots, degree: int = 3, intercept: bool = True) -> np.ndarray:
    """Design with columns [1], x, ..., x^d, (x-t_1)_+^d, ..., (x-t_m)_+^d.

    Column count is intercept + degree + m; with degree 3 and an intercept
    that is m+4.
    """
    x = _as_vector(x)
    knots = _check_knots(knots, float(np.min(x)), float(np.max(x)))
    if degree < 1:
        raise Infeasible("degree must be >= 1")
    block = truncated_power_matrix(x, knots, degree)
    if intercept:
        return np.hstack([np.ones((x.shape[0], 1)), block])
    return block


def bspline_basis(x_eval: float, i: int, degree: int, knot_vector) -> float:
    """One B-spline basis value by the Cox-de Boor recursion.

    Divisions by zero are taken as zero. The zeroth-degree indicator is
    half-open, except that the rightmost knot value belongs to the last
    nonempty interval so the right boundary point is covered.
    """
    t = np.asarray(knot_vector, dtype=np.float64)
    if np.any(np.diff(t) < 0):
        raise Infeasible("knot vector must be nondecreasing")
    if not 0 <= i < t.shape[0] - degree - 1:
        raise Infeasible(f"basis index {i} out of range for degree {degree}")
    return _cox_de_boor(float(x_eval), i, degree, t)


def _cox_de_boor(x: float, i: int, degree: int, t: np.ndarray) -> float:
    if degree == 0:
        if t[i] <= x < t[i + 1]:
            return 1.0
        # closed-right at the global right boundary only
        if x == t[-1] and t[i] < t[i + 1] == t[-1]:
            return 1.0
        return 0.0
    total = 0.0
    den1 = t[i + degree] - t[i]
    if den1 > 0.0:
        total += (x - t[i]) / den1 * _cox_de_boor(x, i, degree - 1, t)
    den2 = t[i + degree + 1] - t[i + 1]
    if den2 > 0.0:
        total += (t[i + degree + 1] - x) / den2 * _cox_de_boor(x, i + 1, degree - 1, t)
    return total


def extended_knot_vector(knots: np.ndarray, degree: int, lo: float, hi: float) -> np.ndarray:
    """Clamped knot vector: boundary knots repeated degree+1 times."""
    return np.concatenate([np.full(degree + 1, lo), knots, np.full(degree + 1, hi)])


def bspline_design_full(x, knots, degree: int, boundary=None) -> np.ndarray:
    """All m + degree + 1 B-spline basis columns (no column dropped)."""
    x = _as_vector(x)
    lo, hi = _resolve_boundary(x, boundary)
    knots = _check_knots(knots, lo, hi)
    ext = extended_knot_vector(knots, degree, lo, hi)
    return bspline_full_matrix(x, ext, degree)


def bspline_design(x, knots, degree: int = 3, intercept: bool = True, boundary=None) -> np.ndarray:
    """B-spline design: m + degree columns, basis-minus-one convention.

    The first basis function is dropped (its span is absorbed by the
    intercept), so with an intercept the design has m + degree + 1 columns;
    for cubic splines that is the familiar m + 4 count.
    """
    if degree < 1:
        raise Infeasible("degree must be >= 1")
    full = bspline_design_full(x, knots, degree, boundary)
    block = full[:, 1:]
    if intercept:
        return np.hstack([np.ones((block.shape[0], 1)), block])
    return block


def natural_cubic_design(x, knots, intercept: bool = True, boundary=None) -> np.ndarray:
    """Natural cubic spline design with m interior knots.

    Built by imposing the two zero-second-derivative boundary constraints
    on the cubic truncated-power basis, which leaves the reduced basis
    {1, x, d_1 - d_{K-1}, ..., d_{K-2} - d_{K-1}} over the K = m+2 knots
    (boundaries included). Column count is m+2 with an intercept. The
    resulting curve is linear outside the boundary interval.
    """
    x = _as_vector(x)
    lo, hi = _resolve_boundary(x, boundary)
    knots = _check_knots(knots, lo, hi)
    if knots.size == 0:
        raise Infeasible("natural cubic basis needs at least one interior knot")

    xi = np.concatenate([[lo], knots, [hi]])
    K = xi.shape[0]
    cub_last = np.maximum(x - xi[K - 1], 0.0) ** 3
    d_last = (np.maximum(x - xi[K - 2], 0.0) ** 3 - cub_last) / (xi[K - 1] - xi[K - 2])
    cols = [x]
    for k in range(K - 2):
        d_k = (np.maximum(x - xi[k], 0.0) ** 3 - cub_last) / (xi[K - 1] - xi[k])
        cols.append(d_k - d_last)
    block = np.column_stack(cols)
    if intercept:
        return np.hstack([np.ones((x.shape[0], 1)), block])
    return block


def design_matrix(x, knots, spec: SplineSpec) -> np.ndarray:
    """Build the design for `spec` at the given interior knots."""
    if spec.basis == "ppolys":
        return truncated_power_design(x, knots, spec.degree, spec.intercept)
    if spec.basis == "bs":
        return bspline_design(x, knots, spec.degree, spec.intercept, spec.boundary)
    return natural_cubic_design(x, knots, spec.intercept, spec.boundary)


def place_knots_equal_quantile(x, k: int) -> np.ndarray:
    """K knots at equally spaced quantile levels strictly inside (0, 1).

    The standard heuristic baseline: levels 1/(K+1), ..., K/(K+1), linear
    interpolation between order statistics.
    """
    if k < 1:
        raise Infeasible("need at least one knot")
    x = np.asarray(x, dtype=np.float64)
    x = x[np.isfinite(x)]
    probs = np.linspace(0.0, 1.0, k + 2)[1:-1]
    return np.quantile(x, probs)
