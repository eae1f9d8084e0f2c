"""Knot handling, basis evaluation, derivatives and spline operations."""

import numpy as np
import numpy.testing as nptest
import pytest

from splinemd.basis import (
    BasisEnv,
    Spline,
    bspline_deriv,
    bspline_value,
    extended_knots,
    knots_from_times,
    pointwise_leq,
    spline_eval,
    sup_norm_bound,
)


class TestExtendedKnots:
    def test_order_one_adds_nothing(self):
        nptest.assert_array_equal(extended_knots(np.arange(5.0), 1), np.arange(5.0))

    def test_cubic_on_five_knots(self):
        delta = extended_knots(np.arange(5.0), 4)
        nptest.assert_array_equal(delta, [0, 0, 0, 0, 1, 2, 3, 4, 4, 4, 4])
        assert delta.size - 4 == 7  # n = order + knots - 2

    def test_minimal_grid(self):
        nptest.assert_array_equal(extended_knots([2.0, 5.0], 2), [2, 2, 5, 5])

    def test_too_few_knots(self):
        with pytest.raises(ValueError, match="at least"):
            extended_knots([0.0], 4)

    def test_non_increasing(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            extended_knots([0.0, 1.0, 1.0, 2.0, 3.0], 2)


class TestKnotSelection:
    def test_nbasis_route(self):
        knots = knots_from_times(np.linspace(0, 1, 100), 4, nbasis=20)
        assert knots.size == 18 and knots[0] == 0.0 and knots[-1] == 1.0

    def test_density_route(self):
        knots = knots_from_times(np.linspace(0, 2, 100), 4, density=0.1)
        assert knots.size == 10

    def test_adaptive_unimplemented(self):
        with pytest.raises(NotImplementedError):
            knots_from_times(np.linspace(0, 1, 50), 4, nbasis=20, grid="adaptive")

    def test_requires_a_size(self):
        with pytest.raises(ValueError):
            knots_from_times(np.linspace(0, 1, 50), 4)


class TestBasisValues:
    def test_order_one_indicator(self):
        env = BasisEnv(np.arange(5.0), 1, 0)
        assert bspline_value(env, 1, 1.5) == 1.0
        assert bspline_value(env, 1, 2.5) == 0.0

    def test_partition_of_unity(self, env180):
        rng = np.random.default_rng(0)
        for t in rng.uniform(0, 1, 25):
            total = sum(bspline_value(env180, i, t) for i in range(env180.n))
            assert abs(total - 1.0) < 1e-12

    def test_cardinal_cubic_center(self):
        env = BasisEnv(np.arange(5.0), 4, 0)
        assert bspline_value(env, 3, 2.0) == pytest.approx(2.0 / 3.0, abs=1e-14)

    def test_nonnegative_and_support(self, env_small):
        env = env_small
        rng = np.random.default_rng(1)
        ts = rng.uniform(0, 1, 200)
        for i in (0, env.n // 2, env.n - 1):
            vals = np.array([bspline_value(env, i, t) for t in ts])
            assert np.all(vals >= 0.0)
            lo, hi = env.extended[i], env.extended[i + env.order]
            outside = (ts < lo) | (ts > hi)
            assert np.all(vals[outside] == 0.0)

    def test_index_and_domain_errors(self, env_small):
        with pytest.raises(IndexError):
            bspline_value(env_small, env_small.n, 0.5)
        with pytest.raises(ValueError):
            bspline_value(env_small, 0, 1.5)


class TestDerivatives:
    def test_order_validation(self, env_small):
        with pytest.raises(ValueError):
            bspline_deriv(env_small, 0, 0.5, 3)

    def test_insufficient_spline_order(self):
        env = BasisEnv(np.arange(5.0), 2, 0)
        with pytest.raises(ValueError, match="too low"):
            bspline_deriv(env, 0, 1.5, 1)

    def test_derivative_sum_vanishes(self, env180):
        rng = np.random.default_rng(2)
        for t in rng.uniform(0.05, 0.95, 10):
            total = sum(bspline_deriv(env180, i, t, 1) for i in range(env180.n))
            assert abs(total) < 1e-9

    def test_finite_difference_first(self, env180):
        rng = np.random.default_rng(3)
        h = 1e-6
        worst = 0.0
        for _ in range(100):
            t = rng.uniform(0.05, 0.95)
            i = rng.integers(0, env180.n)
            fd = (bspline_value(env180, i, t + h) - bspline_value(env180, i, t - h)) / (2 * h)
            an = bspline_deriv(env180, i, t, 1)
            worst = max(worst, abs(fd - an) / max(1.0, abs(an)))
        assert worst < 1e-6

    def test_finite_difference_second(self, env180):
        rng = np.random.default_rng(4)
        f = Spline(rng.standard_normal(env180.n), env180)
        h = 1e-5
        knots = env180.knots
        for _ in range(50):
            t = rng.uniform(0.05, 0.95)
            if np.min(np.abs(knots - t)) < 5 * h:  # FD order degrades across knots
                continue
            fd = (f.eval(t + h) - 2 * f.eval(t) + f.eval(t - h)) / h**2
            assert abs(fd - f.eval(t, 2)) / max(1.0, abs(f.eval(t, 2))) < 1e-4


class TestSplineEval:
    def test_partition_constant(self, env180):
        ones = Spline(np.ones(env180.n), env180)
        rng = np.random.default_rng(5)
        nptest.assert_allclose(ones.eval(rng.uniform(0, 1, 50)), 1.0, atol=1e-12)

    def test_zero_coeffs(self, env_small):
        zero = Spline.zeros(env_small)
        assert spline_eval(zero, 0.3) == 0.0

    def test_cubic_polynomial_reproduction(self, env180):
        # cubics lie in the order-4 space, so a fit-free projection is exact
        from splinemd.fitting import lstsq_fit

        p = lambda t: t**3 - 0.5 * t**2 + 2 * t - 0.25
        f = lstsq_fit(np.linspace(0, 1, 400), p(np.linspace(0, 1, 400)), env180, 0.0)
        ts = np.linspace(0.05, 0.95, 50)
        rel = np.abs(f.eval(ts) - p(ts)) / np.abs(p(ts))
        assert rel.max() < 1e-8

    def test_grid_eval_matches_pointwise(self, env180):
        rng = np.random.default_rng(6)
        f = Spline(rng.standard_normal(env180.n), env180)
        for deriv in (0, 1, 2):
            nptest.assert_allclose(
                f.grid_eval(deriv), f.eval(env180.extgrid, deriv), rtol=1e-12, atol=1e-9
            )

    def test_linearity(self, env_small):
        rng = np.random.default_rng(7)
        a = Spline(rng.standard_normal(env_small.n), env_small)
        b = Spline(rng.standard_normal(env_small.n), env_small)
        ts = rng.uniform(0, 1, 20)
        lhs = Spline(2.5 * a.coeffs - 1.5 * b.coeffs, env_small).eval(ts)
        nptest.assert_allclose(lhs, 2.5 * a.eval(ts) - 1.5 * b.eval(ts), atol=1e-12)

    def test_out_of_domain(self, env_small):
        f = Spline.zeros(env_small)
        with pytest.raises(ValueError):
            f.eval(-0.1)


class TestNormAndOrder:
    def test_bound_tight_for_constants(self, env_small):
        assert sup_norm_bound(Spline(np.ones(env_small.n), env_small)) == 1.0
        assert sup_norm_bound(Spline.zeros(env_small)) == 0.0

    def test_bound_dominates_dense_samples(self, env180):
        rng = np.random.default_rng(8)
        dense = np.linspace(0, 1, 4000)
        for _ in range(100):
            f = Spline(rng.standard_normal(env180.n), env180)
            assert np.max(np.abs(f.eval(dense))) <= sup_norm_bound(f) + 1e-12

    def test_pointwise_leq(self, env_small):
        zero = Spline.zeros(env_small)
        one = Spline.constant(1.0, env_small)
        grid = env_small.extgrid
        assert pointwise_leq(zero, zero, grid)
        assert pointwise_leq(zero, one, grid)
        assert not pointwise_leq(one, zero, grid)

    def test_env_mismatch(self, env_small, env180):
        with pytest.raises(ValueError, match="environments"):
            pointwise_leq(Spline.zeros(env_small), Spline.zeros(env180), env_small.extgrid)
