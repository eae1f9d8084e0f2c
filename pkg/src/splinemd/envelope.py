"""Upper/lower envelope estimation.

The classic method interpolates the local maxima of the signal.  The
iterative slope method generalises it: starting from the zero function,
each pass collects the points where the signal's slope matches the current
envelope iterate's slope under negative curvature, refits through them, and
stops once the iterate moves less than the tolerance in the coefficient sup
norm.  With an infinite tolerance exactly one pass runs and the classic
envelope is recovered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import Spline, sup_norm_bound
from .errors import EnvelopeError

__all__ = [
    "EnvelopeConfig",
    "TangentPointSet",
    "EnvelopeResult",
    "slope_match_points",
    "classic_upper_envelope",
    "iterative_slope_upper_envelope",
    "lower_envelope",
    "upper_envelope_detailed",
    "lower_envelope_detailed",
]

STAGNATION_RUN = 5  # consecutive non-decreasing update norms before aborting

# Envelope interpolation penalises curvature drift (third derivative) with a
# weak curvature term on top.  A pure curvature penalty acts like a natural
# spline: it forces the curvature to zero at the outermost tangent points and
# extends linearly, which visibly distorts the envelope over the first and
# last oscillation.  The drift penalty extends with slowly varying curvature
# instead; the residual curvature term keeps the quadratic modes bounded.
JERK_WEIGHT = 1e-4
CURVATURE_WEIGHT = 3e-8


@dataclass(frozen=True)
class EnvelopeConfig:
    """Iteration tolerance and cap, plus boundary anchoring.

    ``boundary_anchor`` controls whether a domain endpoint whose one-sided
    slope sign witnesses an out-of-domain tangency joins the tangent set.
    Disable it for signals whose endpoint values are not trustworthy (e.g.
    residuals of a previous extraction step).
    """

    eps: float = 0.01
    max_iter: int = 50
    boundary_anchor: bool = True

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive (math.inf selects the classic method)")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass(frozen=True)
class TangentPointSet:
    """Slope-match points (t, s(t)) in strictly increasing time order."""

    times: np.ndarray
    values: np.ndarray

    def __len__(self):
        return self.times.size


@dataclass(frozen=True)
class EnvelopeResult:
    spline: Spline
    converged: bool
    iterations: int


def _bisect_roots(g, lo, hi, scale):
    """Refine the sign-change brackets of ``g`` by simultaneous bisection."""
    glo = g(lo)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        gmid = g(mid)
        take_left = glo * gmid <= 0.0
        hi = np.where(take_left, mid, hi)
        lo = np.where(take_left, lo, mid)
        glo = np.where(take_left, glo, gmid)
        if np.all((hi - lo) <= 1e-15 * scale):
            break
    return 0.5 * (lo + hi)


def slope_match_points(s, m, boundary_anchor=True):
    """Points where s' = m' with negative signal curvature.

    Sign changes of s' - m' between consecutive extended-grid points are
    refined by bisection; grid points with an exact slope match are kept as
    is.  Raises :class:`EnvelopeError` when no point qualifies.
    """
    s._check_env(m)
    env = s.env
    diff = s - m
    g = diff.grid_eval(deriv=1)
    grid = env.extgrid

    exact = np.flatnonzero(g == 0.0)
    sign_change = np.flatnonzero((g[:-1] * g[1:]) < 0.0)
    roots = []
    if sign_change.size:
        span = grid[-1] - grid[0]
        refined = _bisect_roots(
            lambda t: diff.eval(t, deriv=1),
            grid[sign_change],
            grid[sign_change + 1],
            span,
        )
        roots.append(refined)
    if exact.size:
        roots.append(grid[exact])
    if boundary_anchor and roots:
        # Interior matches cross from + to -; a one-sided sign at a domain
        # end witnesses a touch at or beyond the boundary, so the endpoint
        # itself joins the set (the curvature test below rejects the
        # wrong-phase end).  Without interior matches the signal is not
        # oscillatory and no anchor is justified.
        if g[0] < 0.0:
            roots.append(grid[:1])
        if g[-1] > 0.0:
            roots.append(grid[-1:])
    if not roots:
        raise EnvelopeError("no slope-match points: signal has no usable curvature")

    ts = np.sort(np.concatenate(roots))
    curv_ok = s.eval(ts, deriv=2) < 0.0
    ts = ts[curv_ok]
    if ts.size == 0:
        raise EnvelopeError("no slope-match points with negative curvature")
    keep = np.concatenate([[True], np.diff(ts) > 1e-12 * (grid[-1] - grid[0])])
    ts = ts[keep]
    return TangentPointSet(ts, s.eval(ts))


def _curvature_drift_rows(env):
    """Per-knot-span third-derivative rows from the curvature tables.

    The second derivative of an order-4 spline is linear on each span, so
    its across-span difference quotient is the exact third derivative there;
    for higher orders the rows are still a valid roughness measure.
    """
    d2 = env.grid_design_matrix(2)
    knot_idx = np.arange(0, env.extgrid.size, env.infill + 1)
    widths = np.diff(env.knots)
    return (d2[knot_idx[1:]] - d2[knot_idx[:-1]]) / widths[:, None]


def _interpolation_system(env):
    cached = getattr(env, "_envelope_penalty", None)
    if cached is None:
        h = env.mean_knot_spacing
        cached = np.vstack(
            [
                np.sqrt(JERK_WEIGHT) * h**3 * _curvature_drift_rows(env),
                np.sqrt(CURVATURE_WEIGHT) * h**2 * env.grid_design_matrix(2),
            ]
        )
        env._envelope_penalty = cached
    return cached


def _interpolate(points, env):
    if len(points) < 2:
        raise EnvelopeError(
            f"envelope interpolation needs at least 2 tangent points, got {len(points)}"
        )
    penalty = _interpolation_system(env)
    system = np.vstack([env.design_matrix(points.times), penalty])
    rhs = np.concatenate([points.values, np.zeros(penalty.shape[0])])
    coeffs, _, rank, _ = np.linalg.lstsq(system, rhs, rcond=None)
    if rank < env.n:
        raise EnvelopeError("envelope interpolation system is rank deficient")
    return Spline(coeffs, env)


def classic_upper_envelope(s):
    """Least-squares spline through the local maxima of the signal."""
    points = slope_match_points(s, Spline.zeros(s.env))
    return _interpolate(points, s.env)


def upper_envelope_detailed(s, cfg):
    """Iterative slope estimation with convergence metadata."""
    m = Spline.zeros(s.env)
    signal_on_grid = s.grid_eval()
    best = None
    best_violation = math.inf
    deltas = []
    for iteration in range(1, cfg.max_iter + 1):
        points = slope_match_points(s, m, boundary_anchor=cfg.boundary_anchor)
        m_new = _interpolate(points, s.env)
        delta = sup_norm_bound(m_new - m)
        m = m_new

        violation = max(0.0, float(np.max(signal_on_grid - m.grid_eval())))
        if violation <= best_violation:
            best, best_violation = m, violation
        if delta < cfg.eps:
            return EnvelopeResult(m, True, iteration)
        deltas.append(delta)
        if len(deltas) > STAGNATION_RUN and all(
            deltas[i] >= deltas[i - 1] for i in range(-STAGNATION_RUN, 0)
        ):
            return EnvelopeResult(best, False, iteration)
    return EnvelopeResult(m, False, cfg.max_iter)


def iterative_slope_upper_envelope(s, cfg):
    return upper_envelope_detailed(s, cfg).spline


def lower_envelope_detailed(s, cfg):
    res = upper_envelope_detailed(-s, cfg)
    return EnvelopeResult(-res.spline, res.converged, res.iterations)


def lower_envelope(s, cfg):
    """Negated upper envelope of the negated signal."""
    return lower_envelope_detailed(s, cfg).spline
