"""Synthetic problem generators for tests, demos, and acceptance runs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import Infeasible

AR1_BURN_IN = 100


@dataclass(frozen=True)
class SubsetSimSpec:
    """Design for a sparse-regression instance.

    X is n x p standard normal; s0 active coefficients get uniform
    magnitudes in `magnitudes_range` with random signs; errors are iid
    N(0, sigma^2) or, when `rho` is set, a stationary AR(1) with the same
    marginal standard deviation.
    """

    n: int = 100
    p: int = 50
    s0: int = 25
    sigma: float = 1.5
    magnitudes_range: tuple[float, float] = (0.5, 2.0)
    rho: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise Infeasible("n and p must be positive")
        if not 0 <= self.s0 <= self.p:
            raise Infeasible("s0 must lie in [0, p]")
        if self.sigma < 0:
            raise Infeasible("sigma must be nonnegative")
        if self.rho is not None and not abs(self.rho) < 1:
            raise Infeasible("rho must satisfy |rho| < 1")


@dataclass(frozen=True, eq=False)
class SubsetSimResult:
    X: np.ndarray
    y: np.ndarray
    beta_true: np.ndarray
    true_idx: np.ndarray


def sim_subset_data(spec: SubsetSimSpec, rng: np.random.Generator | None = None) -> SubsetSimResult:
    """Generate one sparse-regression instance per `spec`.

    With `rho` set, errors follow e_t = rho * e_{t-1} + z_t with innovation
    sd sigma*sqrt(1-rho^2), started at zero and burned in for 100 steps, so
    the retained stretch is effectively stationary with marginal sd sigma.
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    n, p, s0 = spec.n, spec.p, spec.s0
    X = rng.standard_normal((n, p))

    if s0 > 0:
        true_idx = np.sort(rng.choice(p, size=s0, replace=False))
        signs = rng.choice(np.array([-1.0, 1.0]), size=s0, replace=True)
        magnitudes = rng.uniform(*spec.magnitudes_range, size=s0)
    else:
        true_idx = np.zeros(0, dtype=np.int64)
        signs = np.zeros(0)
        magnitudes = np.zeros(0)

    beta_true = np.zeros(p)
    if s0 > 0:
        beta_true[true_idx] = magnitudes * signs

    if spec.rho is None:
        e = rng.normal(0.0, spec.sigma, size=n)
    else:
        sd_innov = spec.sigma * np.sqrt(1.0 - spec.rho**2)
        z = rng.normal(0.0, sd_innov, size=n + AR1_BURN_IN)
        z[0] = 0.0  # recursion starts from e_0 = 0
        e_full = lfilter([1.0], [1.0, -spec.rho], z)
        e = e_full[AR1_BURN_IN:]

    y = X @ beta_true + e
    return SubsetSimResult(X=X, y=y, beta_true=beta_true, true_idx=true_idx)


def piecewise_linear_mean(x, breaks, slopes, intercept: float = 0.0) -> np.ndarray:
    """Continuous piecewise-linear mean: slope `slopes[k]` after `breaks[k-1]`."""
    x = np.asarray(x, dtype=np.float64)
    breaks = np.asarray(breaks, dtype=np.float64)
    slopes = np.asarray(slopes, dtype=np.float64)
    if slopes.shape[0] != breaks.shape[0] + 1:
        raise Infeasible("need one more slope than breaks")
    mean = intercept + slopes[0] * (x - x.min())
    for k, b in enumerate(breaks):
        mean += (slopes[k + 1] - slopes[k]) * np.maximum(x - b, 0.0)
    return mean


def smooth_test_mean(x) -> np.ndarray:
    """Fixed smooth benchmark curve (a damped sine over the x-range)."""
    x = np.asarray(x, dtype=np.float64)
    u = (x - x.min()) / max(x.max() - x.min(), 1e-12)
    return np.sin(2.5 * np.pi * u) * np.exp(-1.5 * u)


def sim_knot_data(
    n: int,
    breaks,
    slopes=None,
    sigma: float = 0.0,
    intercept: float = 0.0,
    x_lo: float = 0.0,
    x_hi: float | None = None,
    rng: np.random.Generator | None = None,
    seed: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Equispaced x plus a noisy piecewise-linear (or fixed smooth) signal.

    `breaks` of None selects the smooth benchmark curve; otherwise the mean
    is continuous piecewise-linear with the given breakpoints and per-
    segment slopes. Returns (x, y); `x` is strictly increasing.
    """
    if n < 2:
        raise Infeasible("n must be at least 2")
    if rng is None:
        rng = np.random.default_rng(seed)
    if x_hi is None:
        x_hi = x_lo + n - 1
    x = np.linspace(x_lo, x_hi, n)
    if breaks is None:
        mean = smooth_test_mean(x)
    else:
        breaks = np.asarray(breaks, dtype=np.float64)
        if breaks.size and not (x_lo < breaks.min() and breaks.max() < x_hi):
            raise Infeasible("breaks must lie strictly inside the x-range")
        mean = piecewise_linear_mean(x, breaks, slopes, intercept)
    y = mean + sigma * rng.standard_normal(n)
    return x, y
