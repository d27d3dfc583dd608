# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled design-matrix kernels: per-point de Boor evaluation and
truncated-power column fills. Interchangeable with `_fallback`."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

DEF MAX_DEGREE = 32


def truncated_power_matrix(double[::1] x, double[::1] knots, int degree):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t m = knots.shape[0]
    out = np.empty((n, degree + m), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t p, j, k
    cdef double xv, col, diff
    for p in range(n):
        xv = x[p]
        col = xv
        o[p, 0] = col
        for j in range(1, degree):
            col = col * xv
            o[p, j] = col
        for k in range(m):
            diff = xv - knots[k]
            if diff <= 0.0:
                o[p, degree + k] = 0.0
            else:
                o[p, degree + k] = diff ** degree
    return out


cdef inline Py_ssize_t _find_span(double[::1] t, double xv, int degree, Py_ssize_t K) noexcept:
    # largest j with t[j] <= xv < t[j+1]; the right boundary maps to the
    # last nonempty interval
    cdef Py_ssize_t lo, hi, mid
    if xv >= t[K - 1]:
        return K - degree - 2
    lo = degree
    hi = K - degree - 1
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if xv < t[mid]:
            hi = mid
        else:
            lo = mid
    return lo


def bspline_full_matrix(double[::1] x, double[::1] ext_knots, int degree):
    if degree >= MAX_DEGREE:
        raise ValueError("degree too large for the compiled kernel")
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t K = ext_knots.shape[0]
    cdef Py_ssize_t nbasis = K - degree - 1
    out = np.zeros((n, nbasis), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double[MAX_DEGREE + 1] vals
    cdef double[MAX_DEGREE + 1] left
    cdef double[MAX_DEGREE + 1] right
    cdef Py_ssize_t p, span, col
    cdef int d, r
    cdef double xv, saved, temp, den
    for p in range(n):
        xv = x[p]
        if xv < ext_knots[0] or xv > ext_knots[K - 1]:
            continue
        span = _find_span(ext_knots, xv, degree, K)
        vals[0] = 1.0
        for d in range(1, degree + 1):
            left[d] = xv - ext_knots[span + 1 - d]
            right[d] = ext_knots[span + d] - xv
            saved = 0.0
            for r in range(d):
                den = right[r + 1] + left[d - r]
                temp = vals[r] / den
                vals[r] = saved + right[r + 1] * temp
                saved = left[d - r] * temp
            vals[d] = saved
        for r in range(degree + 1):
            col = span - degree + r
            if 0 <= col < nbasis:
                o[p, col] = vals[r]
    return out
