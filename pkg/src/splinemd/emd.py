"""Single hybrid extraction step and the full decomposition driver.

One step estimates both envelopes with the iterative slope method, takes
their mean as the residual, splits signal and amplitude off as coefficient
arithmetic, normalises the oscillation to unit amplitude and recovers its
instantaneous frequency through the linear operator system.  The driver
repeats this on the residual until it carries at most ``stop_extrema``
interior extrema or the component cap is reached.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .basis import Spline
from .envelope import (
    EnvelopeConfig,
    TangentPointSet,
    _interpolate,
    lower_envelope_detailed,
    slope_match_points,
    upper_envelope_detailed,
)
from .errors import EnvelopeError, SplinemdError
from .operators import Characteristic, characteristic, extract_frequency, fit_unit_oscillation

__all__ = [
    "EmdConfig",
    "ImfComponent",
    "Decomposition",
    "sift_step",
    "emd_step",
    "decompose",
    "count_interior_extrema",
]

AMPLITUDE_GUARD = 1e-3  # of the oscillation sup norm; below this skip frequency extraction


@dataclass(frozen=True)
class EmdConfig:
    eps: float = 0.01
    max_imfs: int = 8
    stop_extrema: int = 1

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.max_imfs < 1:
            raise ValueError("max_imfs must be >= 1")
        if self.stop_extrema < 0:
            raise ValueError("stop_extrema must be >= 0")


@dataclass(frozen=True)
class ImfComponent:
    """Extracted oscillation with its amplitude, frequency and characteristic.

    ``freq`` and ``char`` are ``None`` when the amplitude came too close to
    zero for the unit-amplitude normalisation.
    """

    u: Spline
    a: Spline
    freq: Optional[Spline]
    char: Optional[Characteristic]


@dataclass(frozen=True)
class Decomposition:
    components: list
    residual: Spline
    converged: list

    def reconstruct(self):
        total = self.residual
        for comp in self.components:
            total = total + comp.u
        return total


def sift_step(s, eps, boundary_anchor=True):
    """Envelope mean split: returns (oscillation, amplitude, residual)."""
    cfg = EnvelopeConfig(eps=eps, boundary_anchor=boundary_anchor)
    upper, lower, _, _ = _sift_detailed(s, cfg)
    return _combine(s, upper, lower)


def _sift_detailed(s, cfg):
    up = _envelope_with_fallback(upper_envelope_detailed, s, cfg)
    lo = _envelope_with_fallback(lower_envelope_detailed, s, cfg)
    upper, lower = _complete_envelope_pair(s, up.spline, lo.spline, cfg)
    return upper, lower, up.converged, lo.converged


def _envelope_with_fallback(estimator, s, cfg):
    """Retry an infeasible envelope with boundary anchors.

    A residual can keep one of its few extrema only as a boundary touch;
    anchoring is then the only way to reach the two points an envelope fit
    needs.
    """
    try:
        return estimator(s, cfg)
    except EnvelopeError:
        if cfg.boundary_anchor:
            raise
        return estimator(s, replace(cfg, boundary_anchor=True))


# End-zone completion thresholds, as fractions of an envelope's own tangent
# spacing: an envelope is pinned at a domain end when a tangent sits within
# PINNED_FRAC of it, and extrapolating when the nearest tangent is further
# than OPEN_FRAC away.  A completed envelope may cut the signal by at most
# COMPLETION_SLACK_REL of its sup norm; worse candidates are discarded.
PINNED_FRAC = 0.15
OPEN_FRAC = 0.4
COMPLETION_SLACK_REL = 1e-4


def _complete_envelope_pair(s, upper, lower, cfg):
    """Anchor an extrapolating envelope end using the opposite envelope.

    Near a domain end only one envelope usually owns a tangent point; the
    other extrapolates across its final gap, and that error dominates the
    residual there.  Since the amplitude between the envelopes varies slowly
    (that is the model assumption on extracted components), the open
    envelope's endpoint value follows from the pinned envelope's endpoint
    minus the envelope separation at the open side's nearest touch.  The
    open envelope is then refit once with that endpoint added.
    """
    try:
        pts_up = slope_match_points(s, upper, boundary_anchor=cfg.boundary_anchor)
        pts_lo = slope_match_points(-s, -lower, boundary_anchor=cfg.boundary_anchor)
    except EnvelopeError:
        return upper, lower
    lo, hi = s.env.domain

    def end_gap(points, end):
        gap = float(np.min(np.abs(points.times - end)))
        spacing = float(np.median(np.diff(points.times))) if len(points) > 2 else hi - lo
        return gap, spacing

    def completion_ends(own_pts, other_pts):
        ends = []
        for end in (lo, hi):
            own_gap, own_spacing = end_gap(own_pts, end)
            other_gap, other_spacing = end_gap(other_pts, end)
            if own_gap >= OPEN_FRAC * own_spacing and other_gap <= PINNED_FRAC * other_spacing:
                ends.append(end)
        return ends

    signal = s.grid_eval()
    slack = COMPLETION_SLACK_REL * float(np.max(np.abs(signal)))

    def accept(candidate, previous, violation):
        # completed amplitudes are an extrapolation; keep a candidate only
        # if it does not cut the signal worse than the completion slack
        old = violation(previous.grid_eval())
        new = violation(candidate.grid_eval())
        return candidate if new <= max(old, slack) else previous

    ends = completion_ends(pts_lo, pts_up)
    if ends:
        extra_v = []
        for end in ends:
            tn = pts_lo.times[np.argmin(np.abs(pts_lo.times - end))]
            extra_v.append(upper.eval(end) - (upper.eval(tn) - s.eval(tn)))
        times = np.concatenate([pts_lo.times, ends])
        values = np.concatenate([s.eval(pts_lo.times), extra_v])
        order = np.argsort(times)
        candidate = -_interpolate(TangentPointSet(times[order], -values[order]), s.env)
        lower = accept(candidate, lower, lambda env_vals: float(np.max(env_vals - signal)))

    ends = completion_ends(pts_up, pts_lo)
    if ends:
        extra_v = []
        for end in ends:
            tn = pts_up.times[np.argmin(np.abs(pts_up.times - end))]
            extra_v.append(lower.eval(end) + (s.eval(tn) - lower.eval(tn)))
        times = np.concatenate([pts_up.times, ends])
        values = np.concatenate([pts_up.values, extra_v])
        order = np.argsort(times)
        candidate = _interpolate(TangentPointSet(times[order], values[order]), s.env)
        upper = accept(candidate, upper, lambda env_vals: float(np.max(signal - env_vals)))

    return upper, lower


def _combine(s, upper, lower):
    r = Spline(0.5 * (upper.coeffs + lower.coeffs), s.env)
    u = s - r
    a = upper - r
    return u, a, r


def emd_step(s, cfg):
    """One full extraction: sift, normalise, recover frequency."""
    comp, r, _ = _emd_step_detailed(s, cfg)
    return comp, r


def _emd_step_detailed(s, cfg, boundary_anchor=True):
    ecfg = EnvelopeConfig(eps=cfg.eps, boundary_anchor=boundary_anchor)
    upper, lower, up_ok, lo_ok = _sift_detailed(s, ecfg)
    u, a, r = _combine(s, upper, lower)

    env = s.env
    a_grid = a.grid_eval()
    u_sup = float(np.max(np.abs(u.grid_eval())))
    freq = None
    char = None
    if np.min(np.abs(a_grid)) > AMPLITUDE_GUARD * u_sup:
        unit = fit_unit_oscillation(env.extgrid, u.grid_eval() / a_grid, env)
        freq = extract_frequency(unit)
        char = characteristic(a, freq)
    return ImfComponent(u, a, freq, char), r, up_ok and lo_ok


def count_interior_extrema(f):
    """Sign changes of f' strictly inside the domain, counted on the grid."""
    g = f.grid_eval(1)[1:-1]
    lo, hi = f.env.domain
    # a slope is significant only if it implies variation beyond a relative
    # epsilon of the function scale; otherwise fit noise of flat signals
    # would count as oscillation
    tol = 1e-9 * max(1.0, float(np.max(np.abs(f.grid_eval())))) / (hi - lo)
    signs = np.sign(g[np.abs(g) > tol])
    if signs.size < 2:
        return 0
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def decompose(s, cfg):
    """Peel off components until the residual stops oscillating.

    Only the first extraction anchors envelopes at the domain endpoints:
    the input samples there are data, whereas residual endpoint values are
    dominated by the previous step's one-sided envelope extrapolation.
    """
    components = []
    flags = []
    residual = s
    while len(components) < cfg.max_imfs and count_interior_extrema(residual) > cfg.stop_extrema:
        try:
            comp, residual, converged = _emd_step_detailed(
                residual, cfg, boundary_anchor=not components
            )
        except SplinemdError:
            break
        components.append(comp)
        flags.append(converged)
    return Decomposition(components, residual, flags)
