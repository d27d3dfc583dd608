"""Dense least-squares and GLM fitting with information-criterion scoring.

Every objective in the package funnels through these three entry points:
`least_squares`, `glm_fit`, and `info_criterion`. Fits are solved through a
QR decomposition (never the normal equations), and rank deficiency is
reported as an exception so callers can map degenerate configurations to a
losing fitness instead of crashing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import xlogy

from .errors import Infeasible, NonConverged, RankDeficient

# relative threshold on |R_jj| for declaring numerical rank deficiency
RANK_RTOL = 1e-10

# BIC floor used when a fit interpolates exactly (RSS == 0); keeps perfect
# fits ordered by complexity instead of producing -inf
ZERO_RSS_FLOOR = -1e12

IC_KINDS = ("BIC", "AIC", "AICc")

IRLS_TOL = 1e-8
IRLS_MAX_ITER = 50


class GlmFamily(enum.Enum):
    """Supported response families (with their canonical links)."""

    gaussian_identity = "gaussian"
    binomial_logit = "binomial"
    poisson_log = "poisson"


@dataclass
class FitResult:
    """A fitted model: coefficients plus the scalars the objectives need.

    ``rss_or_deviance`` is the residual sum of squares for least-squares
    fits and the residual deviance for GLM fits (identical for the
    gaussian family). ``ic_value``/``ic_kind`` stay ``None`` until a
    criterion is attached.
    """

    coefficients: np.ndarray
    rss_or_deviance: float
    free_params: int
    ic_value: float | None = None
    ic_kind: str | None = None


def _qr_solve(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Solve min ||y - Xb|| by reduced QR; raises RankDeficient."""
    Q, R = np.linalg.qr(X)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or np.min(diag) <= RANK_RTOL * np.max(diag):
        raise RankDeficient(
            f"design matrix rank < {X.shape[1]} at tolerance {RANK_RTOL:g}"
        )
    beta = solve_triangular(R, Q.T @ y, lower=False)
    resid = y - X @ beta
    return beta, float(resid @ resid)


def least_squares(X: np.ndarray, y: np.ndarray) -> FitResult:
    """Ordinary least squares through an orthogonal decomposition.

    Parameters
    ----------
    X : (n, r) design matrix with finite entries.
    y : (n,) response vector.

    Returns
    -------
    FitResult with the minimizing coefficients and the residual sum of
    squares; information-criterion fields are left unset.

    Raises
    ------
    RankDeficient
        If the numerical rank of ``X`` is below its column count.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise Infeasible(f"shape mismatch: X {X.shape} vs y {y.shape}")
    beta, rss = _qr_solve(X, y)
    return FitResult(coefficients=beta, rss_or_deviance=rss, free_params=X.shape[1])


def _binomial_deviance(y: np.ndarray, mu: np.ndarray) -> float:
    return float(2.0 * np.sum(xlogy(y, y / mu) + xlogy(1.0 - y, (1.0 - y) / (1.0 - mu))))


def _poisson_deviance(y: np.ndarray, mu: np.ndarray) -> float:
    return float(2.0 * np.sum(xlogy(y, y / mu) - (y - mu)))


def glm_fit(X: np.ndarray, y: np.ndarray, family: GlmFamily) -> FitResult:
    """Fit a GLM by iteratively reweighted least squares.

    The gaussian/identity family reduces exactly to `least_squares` (with
    the RSS reported as the deviance). Binomial expects responses in
    [0, 1]; poisson expects nonnegative counts. Convergence is declared
    when the deviance changes by less than a 1e-8 relative tolerance;
    steps that increase the deviance are halved before giving up.

    Raises
    ------
    NonConverged after 50 IRLS iterations without meeting the tolerance.
    RankDeficient if the (weighted) design loses full column rank.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if family is GlmFamily.gaussian_identity:
        return least_squares(X, y)

    if family is GlmFamily.binomial_logit:
        if np.any((y < 0) | (y > 1)):
            raise Infeasible("binomial responses must lie in [0, 1]")
        mu = (y + 0.5) / 2.0
        eta = np.log(mu / (1.0 - mu))
        deviance_of = _binomial_deviance
    elif family is GlmFamily.poisson_log:
        if np.any(y < 0):
            raise Infeasible("poisson responses must be nonnegative")
        mu = y + 0.5
        eta = np.log(mu)
        deviance_of = _poisson_deviance
    else:  # pragma: no cover - enum is closed
        raise Infeasible(f"unsupported family {family}")

    beta = np.zeros(X.shape[1])
    dev = deviance_of(y, mu)
    for _ in range(IRLS_MAX_ITER):
        if family is GlmFamily.binomial_logit:
            w = mu * (1.0 - mu)
        else:
            w = mu
        w = np.maximum(w, 1e-12)
        z = eta + (y - mu) / w
        sw = np.sqrt(w)
        beta_new, _ = _qr_solve(X * sw[:, None], z * sw)

        # step-halve while the proposed update worsens the deviance
        step = beta_new - beta
        for _half in range(30):
            eta = X @ (beta + step)
            if family is GlmFamily.binomial_logit:
                mu = 1.0 / (1.0 + np.exp(-eta))
                mu = np.clip(mu, 1e-12, 1.0 - 1e-12)
            else:
                mu = np.exp(np.clip(eta, -700, 700))
                mu = np.maximum(mu, 1e-12)
            dev_new = deviance_of(y, mu)
            if np.isfinite(dev_new) and dev_new <= dev + 1e-12:
                break
            step = step / 2.0
        beta = beta + step
        if abs(dev_new - dev) / (0.1 + abs(dev_new)) < IRLS_TOL:
            return FitResult(
                coefficients=beta,
                rss_or_deviance=float(dev_new),
                free_params=X.shape[1],
            )
        dev = dev_new
    raise NonConverged(f"IRLS did not converge in {IRLS_MAX_ITER} iterations")


def info_criterion(
    n: int,
    rss_or_deviance: float,
    r: int,
    kind: str = "BIC",
    family: GlmFamily = GlmFamily.gaussian_identity,
) -> float:
    """Penalized-likelihood score for a fitted model.

    Gaussian fits use the profiled log-likelihood, ``n * ln(RSS/n)``; the
    other families use the residual deviance directly. The complexity
    penalty is ``r ln n`` (BIC), ``2r`` (AIC), or the small-sample AICc
    correction; all three vanish at r = 0.
    """
    if kind not in IC_KINDS:
        raise Infeasible(f"unknown criterion {kind!r}; expected one of {IC_KINDS}")
    if n < 1:
        raise Infeasible("n must be at least 1")
    if rss_or_deviance < 0:
        raise Infeasible("rss/deviance must be nonnegative")

    if family is GlmFamily.gaussian_identity:
        if rss_or_deviance == 0.0:
            goodness = ZERO_RSS_FLOOR
        else:
            goodness = n * np.log(rss_or_deviance / n)
    else:
        goodness = rss_or_deviance

    if kind == "BIC":
        penalty = r * np.log(n)
    else:
        penalty = 2.0 * r
        if kind == "AICc":
            if n - r - 1 <= 0:
                raise Infeasible(f"AICc undefined for n={n}, r={r}")
            penalty += 2.0 * r * (r + 1) / (n - r - 1)
    return float(goodness + penalty)


def score_fit(
    fit: FitResult,
    n: int,
    kind: str = "BIC",
    family: GlmFamily = GlmFamily.gaussian_identity,
    r: int | None = None,
) -> FitResult:
    """Attach an information criterion to a fit; r defaults to free_params."""
    r_eff = fit.free_params if r is None else r
    fit.ic_value = info_criterion(n, fit.rss_or_deviance, r_eff, kind, family)
    fit.ic_kind = kind
    return fit
