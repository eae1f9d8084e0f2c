# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled B-spline evaluation kernel.

Mirrors ``_bspline_np.basis_arrays`` exactly; the recursion runs per point
in C loops instead of vectorised numpy passes.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"

cdef enum:
    MAXK = 32  # spline orders above this fall back to the numpy kernel


def basis_arrays(delta, int k, ts):
    """See ``splinemd._kernels._bspline_np.basis_arrays``."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] delta_ = np.ascontiguousarray(delta, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ts_ = np.ascontiguousarray(ts, dtype=np.float64)
    cdef Py_ssize_t m = ts_.shape[0]
    cdef Py_ssize_t n = delta_.shape[0] - k
    if k < 1 or k > MAXK:
        raise ValueError("order out of range for compiled kernel")

    cdef cnp.ndarray[cnp.int64_t, ndim=1] spans = np.empty(m, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] vals = np.zeros((m, k), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] d1 = np.zeros((m, k), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] d2 = np.zeros((m, k), dtype=np.float64)

    cdef const double[::1] dlt = delta_
    cdef const double[::1] tv = ts_

    cdef double work[MAXK]
    cdef double row_km1[MAXK]
    cdef double row_km2[MAXK]
    cdef double padded[MAXK + 2]
    cdef double ratio[MAXK + 2]
    cdef double dlow[MAXK + 1]
    cdef double left[MAXK]
    cdef double right[MAXK]

    cdef Py_ssize_t p, span, base, lo, hi, mid, deg, i, j
    cdef double t, saved, temp, den

    for p in range(m):
        t = tv[p]
        # span search: first index with delta[span] <= t < delta[span + 1]
        lo = 0
        hi = n + k
        while lo < hi:
            mid = (lo + hi) // 2
            if dlt[mid] <= t:
                lo = mid + 1
            else:
                hi = mid
        span = lo - 1
        if span < k - 1:
            span = k - 1
        if span > n - 1:
            span = n - 1
        spans[p] = span
        base = span - (k - 1)

        work[0] = 1.0
        for deg in range(1, k):
            if deg == k - 2:
                for i in range(deg):
                    row_km2[i] = work[i]
            if deg == k - 1:
                for i in range(deg):
                    row_km1[i] = work[i]
            for j in range(1, deg + 1):
                left[j] = t - dlt[span + 1 - j]
                right[j] = dlt[span + j] - t
            saved = 0.0
            for i in range(deg):
                den = right[i + 1] + left[deg - i]
                if den != 0.0:
                    temp = work[i] / den
                else:
                    temp = 0.0
                work[i] = saved + right[i + 1] * temp
                saved = left[deg - i] * temp
            work[deg] = saved
        for i in range(k):
            vals[p, i] = work[i]

        if k >= 2:
            # first derivative from the order-(k-1) row
            for j in range(k + 1):
                padded[j] = 0.0
            for j in range(k - 1):
                padded[j + 1] = row_km1[j]
            for j in range(k + 1):
                den = dlt[base + j + k - 1] - dlt[base + j]
                ratio[j] = padded[j] / den if den != 0.0 else 0.0
            for i in range(k):
                d1[p, i] = (k - 1) * (ratio[i] - ratio[i + 1])

        if k >= 3:
            # derivatives of the order-(k-1) functions from the order-(k-2) row
            for j in range(k + 2):
                padded[j] = 0.0
            for j in range(k - 2):
                padded[j + 2] = row_km2[j]
            for j in range(k + 2):
                den = dlt[base + j + k - 2] - dlt[base + j]
                ratio[j] = padded[j] / den if den != 0.0 else 0.0
            for j in range(k + 1):
                dlow[j] = (k - 2) * (ratio[j] - ratio[j + 1])
            for j in range(k + 1):
                den = dlt[base + j + k - 1] - dlt[base + j]
                ratio[j] = dlow[j] / den if den != 0.0 else 0.0
            for i in range(k):
                d2[p, i] = (k - 1) * (ratio[i] - ratio[i + 1])

    return spans, vals, d1, d2
