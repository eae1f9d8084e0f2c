"""Smoothness-penalised least-squares spline fitting and boundary mirroring."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import Spline
from .errors import FitError

__all__ = ["SampleSeries", "FitConfig", "fit", "extend_boundary"]

ENDPOINT_TOL = 1e-9


@dataclass(frozen=True)
class SampleSeries:
    """Discrete signal: strictly increasing times with matching values."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if times.ndim != 1 or values.ndim != 1 or times.size != values.size:
            raise ValueError("times and values must be 1-d arrays of equal length")
        if times.size < 2:
            raise ValueError("need at least two samples")
        if not np.all(np.diff(times) > 0):
            raise ValueError("sample times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.times.size


@dataclass(frozen=True)
class FitConfig:
    """Weight on the second-derivative penalty rows (dimensionless)."""

    smooth_weight: float = 1e-8

    def __post_init__(self):
        if self.smooth_weight < 0:
            raise ValueError("smooth_weight must be nonnegative")


def lstsq_fit(times, values, env, smooth_weight):
    """Core solver: data rows plus curvature rows on the extended grid.

    The curvature rows are scaled by the squared mean knot spacing so the
    penalty compares second differences at coefficient scale rather than raw
    second derivatives (which grow like 1/spacing^2); ``smooth_weight`` is
    therefore dimensionless against the data rows.
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    data_rows = env.design_matrix(times)
    if smooth_weight > 0.0:
        scale = np.sqrt(smooth_weight) * env.mean_knot_spacing**2
        system = np.vstack([data_rows, scale * env.grid_design_matrix(deriv=2)])
        rhs = np.concatenate([values, np.zeros(env.extgrid.size)])
    else:
        system = data_rows
        rhs = values
    coeffs, _, rank, _ = np.linalg.lstsq(system, rhs, rcond=None)
    if rank < env.n:
        raise FitError(
            f"fit system rank {rank} < {env.n}: too few samples for the basis size"
        )
    return Spline(coeffs, env)


def fit(series, env, cfg=FitConfig()):
    """Fit a spline to a sampled signal on the given environment.

    The sample times must lie inside the knot domain and agree with its
    endpoints; scattered interior point sets (envelope interpolation) go
    through :func:`lstsq_fit` directly.
    """
    lo, hi = env.domain
    tol = ENDPOINT_TOL * max(1.0, hi - lo)
    if abs(series.times[0] - lo) > tol or abs(series.times[-1] - hi) > tol:
        raise FitError(
            "sample range does not agree with the knot domain endpoints: "
            f"[{series.times[0]:g}, {series.times[-1]:g}] vs [{lo:g}, {hi:g}]"
        )
    env.require_inside(series.times)
    return lstsq_fit(series.times, series.values, env, cfg.smooth_weight)


def extend_boundary(series, ratio):
    """Mirror ``floor(ratio * N)`` samples past each end of the series."""
    if not 0.0 <= ratio < 1.0:
        raise ValueError("extension ratio must lie in [0, 1)")
    m = int(np.floor(ratio * len(series)))
    if m == 0:
        return series
    t, v = series.times, series.values
    left_t = 2.0 * t[0] - t[m:0:-1]
    right_t = 2.0 * t[-1] - t[-2 : -2 - m : -1]
    left_v = v[m:0:-1]
    right_v = v[-2 : -2 - m : -1]
    return SampleSeries(
        np.concatenate([left_t, t, right_t]),
        np.concatenate([left_v, v, right_v]),
    )
