"""Vectorised numpy implementation of the B-spline evaluation kernel.

This is the portable fallback for the compiled Cython kernel.  Both backends
implement ``basis_arrays`` with identical semantics; the numpy version
vectorises the de Boor-Cox recursion over evaluation points, looping only
over the spline order.
"""

import numpy as np

BACKEND = "python"


def _safe_div(num, den):
    """Elementwise num/den where a zero denominator yields a zero term."""
    out = np.zeros_like(num)
    np.divide(num, den, out=out, where=den != 0.0)
    return out


def basis_arrays(delta, k, ts):
    """Evaluate the nonzero B-splines and their derivatives at each point.

    Parameters
    ----------
    delta : (n + k,) float array
        Extended knot vector (end knots repeated ``k`` times).
    k : int
        Spline order (>= 1).
    ts : (m,) float array
        Evaluation points inside ``[delta[0], delta[-1]]``.

    Returns
    -------
    spans : (m,) int64 array
        Knot-span index ``j`` with ``delta[j] <= t < delta[j + 1]`` (the
        final point of the domain is folded into the last span so the
        rightmost basis function is closed on the right).
    vals, d1, d2 : (m, k) float arrays
        ``vals[p, i]`` is the value of basis function ``spans[p] - k + 1 + i``
        at ``ts[p]``; ``d1``/``d2`` hold first and second derivatives.
        Derivative rows are zero where the order does not support them.
    """
    delta = np.asarray(delta, dtype=np.float64)
    ts = np.asarray(ts, dtype=np.float64)
    n = delta.shape[0] - k
    m = ts.shape[0]

    spans = np.searchsorted(delta, ts, side="right") - 1
    np.clip(spans, k - 1, n - 1, out=spans)
    spans = spans.astype(np.int64)

    vals = np.ones((m, 1))
    row_km1 = None  # order k-1 values
    row_km2 = None  # order k-2 values
    for deg in range(1, k):  # after this pass `vals` holds order deg+1
        if deg == k - 2:
            row_km2 = vals
        if deg == k - 1:
            row_km1 = vals
        left = ts[:, None] - delta[spans[:, None] + 1 - np.arange(1, deg + 1)]
        right = delta[spans[:, None] + np.arange(1, deg + 1)] - ts[:, None]
        new = np.empty((m, deg + 1))
        saved = np.zeros(m)
        for i in range(deg):
            den = right[:, i] + left[:, deg - 1 - i]
            temp = _safe_div(vals[:, i], den)
            new[:, i] = saved + right[:, i] * temp
            saved = left[:, deg - 1 - i] * temp
        new[:, deg] = saved
        vals = new

    d1 = np.zeros((m, k))
    d2 = np.zeros((m, k))
    base = spans - (k - 1)
    if k >= 2:
        d1 = _deriv_step(delta, base, _pad_row(row_km1, m, k + 1, 1), k - 1, k)
    if k >= 3:
        d1_km1 = _deriv_step(delta, base, _pad_row(row_km2, m, k + 2, 2), k - 2, k + 1)
        d2 = _deriv_step(delta, base, d1_km1, k - 1, k)
    return spans, vals, d1, d2


def _pad_row(row, m, width, offset):
    """Embed an order-r value row into a window of basis indices base+0.."""
    padded = np.zeros((m, width))
    padded[:, offset : offset + row.shape[1]] = row
    return padded


def _deriv_step(delta, base, lower, order_lower, out_width):
    """One application of the derivative recurrence.

    ``lower[p, j]`` holds (derivatives of) basis function ``base[p] + j`` of
    order ``order_lower``; the result has ``out_width`` columns for functions
    ``base[p] + j`` of order ``order_lower + 1``.
    """
    m, width = lower.shape
    idx = base[:, None] + np.arange(width)
    den = delta[idx + order_lower] - delta[idx]
    ratio = _safe_div(lower, den)
    return order_lower * (ratio[:, :out_width] - ratio[:, 1 : out_width + 1])
