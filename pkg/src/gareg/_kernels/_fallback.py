"""Pure-numpy implementations of the design-matrix kernels.

Selected at import when the compiled extension is unavailable or when
``GAREG_PURE_PYTHON`` is set. Must stay numerically interchangeable with
`gareg._kernels._speedups` (the test suite compares both backends).
"""

from __future__ import annotations

import numpy as np


def truncated_power_matrix(x: np.ndarray, knots: np.ndarray, degree: int) -> np.ndarray:
    """Columns x^1..x^degree followed by (x - t_k)_+^degree, no intercept."""
    n = x.shape[0]
    m = knots.shape[0]
    out = np.empty((n, degree + m), dtype=np.float64)
    col = x.copy()
    out[:, 0] = col
    for j in range(1, degree):
        col = col * x
        out[:, j] = col
    for k in range(m):
        out[:, degree + k] = np.maximum(x - knots[k], 0.0) ** degree
    return out


def bspline_full_matrix(x: np.ndarray, ext_knots: np.ndarray, degree: int) -> np.ndarray:
    """All K - degree - 1 B-spline basis columns on an extended knot vector.

    Cox-de Boor recursion, vectorized over evaluation points. The zeroth
    degree indicator is half-open except at the rightmost knot value, which
    is assigned to the last nonempty interval so boundary points are covered.
    """
    t = ext_knots
    K = t.shape[0]
    xc = x[:, None]
    basis = ((t[:-1][None, :] <= xc) & (xc < t[1:][None, :])).astype(np.float64)

    at_hi = x == t[-1]
    if at_hi.any():
        # last interval [t_i, t_{i+1}) with t_{i+1} equal to the right boundary
        i_last = int(np.searchsorted(t, t[-1], side="left")) - 1
        basis[at_hi, :] = 0.0
        basis[at_hi, i_last] = 1.0

    for d in range(1, degree + 1):
        nb = K - d - 1
        nxt = np.zeros((x.shape[0], nb), dtype=np.float64)
        for i in range(nb):
            den1 = t[i + d] - t[i]
            if den1 > 0.0:
                nxt[:, i] += (x - t[i]) / den1 * basis[:, i]
            den2 = t[i + d + 1] - t[i + 1]
            if den2 > 0.0:
                nxt[:, i] += (t[i + d + 1] - x) / den2 * basis[:, i + 1]
        basis = nxt
    return basis
