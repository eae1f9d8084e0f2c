"""B-spline basis environments and spline functions.

A :class:`BasisEnv` fixes a spline order, a strictly increasing knot vector,
the end-knot-repeated extended knot vector and a dense evaluation grid (the
knots in-filled with ``infill`` uniform points per interval).  Basis values
and first/second derivatives are precomputed on that grid in band form (only
the ``order`` nonzero functions per point), so grid evaluations are cheap.

A :class:`Spline` is a coefficient vector bound to an environment; all
functions in the toolkit (signals, envelopes, amplitudes, frequencies) are
represented this way.
"""

from __future__ import annotations

import numpy as np

from ._kernels import basis_arrays

__all__ = [
    "BasisEnv",
    "Spline",
    "extended_knots",
    "knots_from_times",
    "bspline_value",
    "bspline_deriv",
    "spline_eval",
    "sup_norm_bound",
    "pointwise_leq",
]

ORDER_TOL = 1e-12  # slack for the pointwise function order


def _readonly(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def extended_knots(knots, order):
    """Repeat the first and last knot ``order`` times.

    With ``l`` knots this yields ``n + order`` entries, ``n = order + l - 2``,
    carrying exactly ``n`` basis functions.
    """
    knots = np.asarray(knots, dtype=np.float64)
    # two knots with full end repetition are already a valid (Bezier-like)
    # configuration, so only a single-knot vector is rejected
    if knots.ndim != 1 or knots.size < 2:
        raise ValueError(f"need at least 2 knots, got {knots.size}")
    if not np.all(np.diff(knots) > 0):
        raise ValueError("knot vector must be strictly increasing")
    return np.concatenate(
        [np.full(order - 1, knots[0]), knots, np.full(order - 1, knots[-1])]
    )


def knots_from_times(times, order, nbasis=None, density=None, grid="uniform"):
    """Select a knot vector covering the time range of a sampled signal.

    Either ``nbasis`` (number of basis functions; knot count is then
    ``nbasis - order + 2``) or ``density`` (fraction of the sample count used
    as knot count) must be given.  Only uniform selection is implemented.
    """
    if grid == "adaptive":
        raise NotImplementedError("adaptive knot selection is not implemented")
    if grid != "uniform":
        raise ValueError(f"unknown grid type {grid!r}")
    times = np.asarray(times, dtype=np.float64)
    if nbasis is not None:
        nknots = nbasis - order + 2
    elif density is not None:
        if not 0.0 < density < 1.0:
            raise ValueError("density must lie in (0, 1)")
        nknots = max(order + 1, int(round(density * times.size)))
    else:
        raise ValueError("one of nbasis or density is required")
    if nknots < order + 1:
        raise ValueError(f"nbasis={nbasis} too small for order {order}")
    return np.linspace(times[0], times[-1], nknots)


class BasisEnv:
    """Immutable knot/grid environment with precomputed basis tables."""

    def __init__(self, knots, order, infill):
        if order < 1:
            raise ValueError("order must be >= 1")
        if infill < 0:
            raise ValueError("infill must be >= 0")
        self.order = int(order)
        self.infill = int(infill)
        self.knots = _readonly(np.asarray(knots, dtype=np.float64))
        self.extended = _readonly(extended_knots(self.knots, self.order))
        self.n = self.order + self.knots.size - 2

        steps = np.linspace(0.0, 1.0, infill + 2)[:-1]  # left edge + infill points
        pieces = self.knots[:-1, None] + steps[None, :] * np.diff(self.knots)[:, None]
        extgrid = np.append(pieces.ravel(), self.knots[-1])
        self.extgrid = _readonly(extgrid)

        spans, vals, d1, d2 = basis_arrays(self.extended, self.order, self.extgrid)
        self.grid_spans = spans
        self.grid_spans.setflags(write=False)
        self.grid_values = _readonly(vals)
        self.grid_d1 = _readonly(d1)
        self.grid_d2 = _readonly(d2)

    @classmethod
    def uniform(cls, start, stop, order, nbasis, infill):
        """Environment with ``nbasis`` functions on uniform knots over [start, stop]."""
        return cls(np.linspace(start, stop, nbasis - order + 2), order, infill)

    @property
    def domain(self):
        return float(self.knots[0]), float(self.knots[-1])

    @property
    def mean_knot_spacing(self):
        return (self.knots[-1] - self.knots[0]) / (self.knots.size - 1)

    def contains(self, t):
        lo, hi = self.domain
        slack = 1e-12 * max(1.0, hi - lo)
        return (np.asarray(t) >= lo - slack) & (np.asarray(t) <= hi + slack)

    def require_inside(self, t):
        if not np.all(self.contains(t)):
            raise ValueError("evaluation point outside the spline domain")

    def _grid_table(self, deriv):
        return (self.grid_values, self.grid_d1, self.grid_d2)[deriv]

    def design_matrix(self, ts, deriv=0):
        """Dense matrix of basis (derivative) values at the given points."""
        ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
        self.require_inside(ts)
        spans, vals, d1, d2 = basis_arrays(self.extended, self.order, ts)
        table = (vals, d1, d2)[deriv]
        out = np.zeros((ts.size, self.n))
        cols = spans[:, None] - (self.order - 1) + np.arange(self.order)
        np.put_along_axis(out, cols, table, axis=1)
        return out

    def grid_design_matrix(self, deriv=0):
        """Dense basis matrix on the extended grid, from the precomputed tables."""
        out = np.zeros((self.extgrid.size, self.n))
        cols = self.grid_spans[:, None] - (self.order - 1) + np.arange(self.order)
        np.put_along_axis(out, cols, self._grid_table(deriv), axis=1)
        return out

    def __repr__(self):
        lo, hi = self.domain
        return (
            f"BasisEnv(order={self.order}, n={self.n}, infill={self.infill}, "
            f"domain=[{lo:g}, {hi:g}])"
        )


class Spline:
    """Coefficient vector bound to a :class:`BasisEnv`."""

    __slots__ = ("coeffs", "env")

    def __init__(self, coeffs, env):
        coeffs = np.asarray(coeffs, dtype=np.float64)
        if coeffs.shape != (env.n,):
            raise ValueError(f"expected {env.n} coefficients, got {coeffs.shape}")
        self.coeffs = _readonly(coeffs)
        self.env = env

    @classmethod
    def zeros(cls, env):
        return cls(np.zeros(env.n), env)

    @classmethod
    def constant(cls, value, env):
        return cls(np.full(env.n, float(value)), env)

    def eval(self, t, deriv=0):
        """Evaluate the spline (or a derivative) at arbitrary in-domain points."""
        if deriv not in (0, 1, 2):
            raise ValueError("deriv must be 0, 1 or 2")
        t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
        self.env.require_inside(t_arr)
        spans, vals, d1, d2 = basis_arrays(self.env.extended, self.env.order, t_arr)
        out = self._combine(spans, (vals, d1, d2)[deriv])
        return out if np.ndim(t) else float(out[0])

    def grid_eval(self, deriv=0):
        """Evaluate on the environment's extended grid via the precomputed tables."""
        env = self.env
        return self._combine(env.grid_spans, env._grid_table(deriv))

    def _combine(self, spans, table):
        k = self.env.order
        cols = spans[:, None] - (k - 1) + np.arange(k)
        return np.einsum("ij,ij->i", self.coeffs[cols], table)

    def __call__(self, t, deriv=0):
        return self.eval(t, deriv)

    def _check_env(self, other):
        if self.env is not other.env:
            raise ValueError("splines belong to different basis environments")

    def __add__(self, other):
        self._check_env(other)
        return Spline(self.coeffs + other.coeffs, self.env)

    def __sub__(self, other):
        self._check_env(other)
        return Spline(self.coeffs - other.coeffs, self.env)

    def __neg__(self):
        return Spline(-self.coeffs, self.env)

    def __mul__(self, scalar):
        return Spline(self.coeffs * float(scalar), self.env)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Spline(n={self.env.n}, order={self.env.order})"


def bspline_value(env, i, t):
    """Value of basis function ``i`` at ``t`` via the de Boor-Cox recursion."""
    if not 0 <= i < env.n:
        raise IndexError(f"basis index {i} out of range [0, {env.n})")
    env.require_inside(t)
    spans, vals, _, _ = basis_arrays(env.extended, env.order, np.atleast_1d(float(t)))
    offset = i - (int(spans[0]) - (env.order - 1))
    if 0 <= offset < env.order:
        return float(vals[0, offset])
    return 0.0


def bspline_deriv(env, i, t, order):
    """First or second derivative of basis function ``i`` at ``t``."""
    if order not in (1, 2):
        raise ValueError("derivative order must be 1 or 2")
    if env.order < order + 2:
        raise ValueError(
            f"spline order {env.order} too low for a continuous derivative of order {order}"
        )
    if not 0 <= i < env.n:
        raise IndexError(f"basis index {i} out of range [0, {env.n})")
    env.require_inside(t)
    spans, _, d1, d2 = basis_arrays(env.extended, env.order, np.atleast_1d(float(t)))
    table = d1 if order == 1 else d2
    offset = i - (int(spans[0]) - (env.order - 1))
    if 0 <= offset < env.order:
        return float(table[0, offset])
    return 0.0


def spline_eval(f, t, deriv=0):
    return f.eval(t, deriv)


def sup_norm_bound(f):
    """Upper bound for the sup norm: the sup norm of the coefficient vector."""
    return float(np.max(np.abs(f.coeffs))) if f.coeffs.size else 0.0


def pointwise_leq(f, g, grid):
    """Numerical surrogate for the pointwise function order f <= g on a grid."""
    f._check_env(g)
    diff = g - f
    return bool(np.all(diff.eval(np.asarray(grid, dtype=np.float64)) >= -ORDER_TOL))
