"""Activation, diffusion coefficient, drift and the detailed-balance residual."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adavol.diffusion import (
    ActivationParams,
    activation,
    activation_derivative,
    coefficient_gradient,
    coefficients,
    detailed_balance_residual,
    drift,
    gibbs_on_grid,
    scalar_coefficient,
)
from adavol.errors import DomainError
from adavol.objective import DoubleWell, Quadratic

lams = st.floats(0, 1e4)
thetas = st.floats(0, 100)
levels = st.floats(-1e3, 1e3)


class TestActivationParams:
    @pytest.mark.parametrize("kw", [{"lam": -1}, {"theta": -0.1}, {"c": math.nan}, {"c": math.inf}])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            ActivationParams(**kw)

    def test_with_threshold(self):
        p = ActivationParams(2.0, 3.0, 1.0).with_threshold(-4.0)
        assert (p.lam, p.theta, p.c) == (2.0, 3.0, -4.0)


class TestActivation:
    def test_zero_at_origin(self):
        assert activation(ActivationParams(7.0, 3.0), 0.0) == 0.0

    def test_saturation(self):
        assert activation(ActivationParams(1e4, 1.0), 10.0) == pytest.approx(1e4, rel=1e-15)

    def test_lambda_zero(self):
        np.testing.assert_array_equal(activation(ActivationParams(0.0, 5.0), np.array([0.0, 1.0, 1e6])), 0.0)

    def test_negative_argument(self):
        with pytest.raises(ValueError):
            activation(ActivationParams(1.0, 1.0), -1e-12)
        with pytest.raises(ValueError):
            activation_derivative(ActivationParams(1.0, 1.0), -1.0)

    def test_bounded_and_monotone_on_log_grid(self):
        u = np.concatenate([[0.0], np.logspace(-8, 6, 2000)])
        for p in (ActivationParams(1.0, 1.0), ActivationParams(1e4, 1.0), ActivationParams(3.0, 1e-3)):
            f = activation(p, u)
            assert np.all(f >= 0) and np.all(f <= p.lam)
            assert np.all(np.diff(f) >= 0)

    def test_small_argument_keeps_precision(self):
        # lam (1 - e^{-theta u^2}) ~ lam theta u^2 for small u
        assert activation(ActivationParams(1.0, 1.0), 1e-10) == pytest.approx(1e-20, rel=1e-10)


class TestActivationDerivative:
    def test_zero_at_origin(self):
        assert activation_derivative(ActivationParams(5.0, 2.0), 0.0) == 0.0

    def test_maximum_by_grid_search(self):
        p = ActivationParams(1.0, 1.0)
        u = np.linspace(0, 10, 1_000_001)
        grid_max = activation_derivative(p, u).max()
        at_peak = activation_derivative(p, 1 / math.sqrt(2))
        assert at_peak == pytest.approx(math.sqrt(2) * math.exp(-0.5), rel=1e-15)
        assert grid_max <= at_peak * (1 + 1e-15)
        assert grid_max == pytest.approx(at_peak, rel=1e-10)

    def test_value(self):
        p = ActivationParams(2.0, 3.0)
        assert activation_derivative(p, 1.0) == pytest.approx(12 * math.exp(-3), rel=1e-15)
        fd = (activation(p, 1 + 1e-6) - activation(p, 1 - 1e-6)) / 2e-6
        assert fd == pytest.approx(12 * math.exp(-3), rel=1e-8)

    def test_matches_finite_differences(self):
        u = np.linspace(0.01, 10, 500)
        for p in (ActivationParams(1.0, 1.0), ActivationParams(2.0, 0.3), ActivationParams(50.0, 0.05)):
            h = 1e-6
            fd = (activation(p, u + h) - activation(p, u - h)) / (2 * h)
            exact = activation_derivative(p, u)
            # relative to the scale of f' where it has decayed to ~0
            assert np.all(np.abs(fd - exact) <= 1e-6 * np.maximum(np.abs(exact), 1e-3 * p.lam))

    def test_infinite_argument(self):
        assert activation_derivative(ActivationParams(1.0, 1.0), math.inf) == 0.0


class TestScalarCoefficient:
    def test_below_threshold(self):
        p = ActivationParams(10.0, 1.0, c=2.0)
        np.testing.assert_array_equal(scalar_coefficient(p, np.array([-5.0, 1.0, 2.0])), 1.0)

    def test_saturated(self):
        assert scalar_coefficient(ActivationParams(1e4, 1.0, 0.0), 100.0) == pytest.approx(1e4 + 1, rel=1e-15)

    def test_lambda_zero(self):
        assert scalar_coefficient(ActivationParams(0.0, 1.0), 1e8) == 1.0

    @settings(max_examples=300, deadline=None)
    @given(lams, thetas, levels, st.floats(-1e6, 1e6))
    def test_range(self, lam, theta, c, fval):
        h = scalar_coefficient(ActivationParams(lam, theta, c), fval)
        assert 1.0 <= h <= lam + 1
        if fval <= c:
            assert h == 1.0


class TestCoefficientGradient:
    def test_zero_below_threshold(self):
        p = ActivationParams(3.0, 1.0, c=1.0)
        np.testing.assert_array_equal(coefficient_gradient(p, 0.5, np.array([4.0, -2.0])), 0.0)

    def test_value(self):
        p = ActivationParams(1.0, 1.0, 0.0)
        g = coefficient_gradient(p, 1.0, np.array([1.0, 0.0]))
        np.testing.assert_allclose(g, [2 * math.exp(-1), 0.0], rtol=1e-15)

    def test_chain_rule_by_finite_differences(self):
        # h(x) = f((F(x) - c)^+) + 1 with F = x^2/2 at x = 1.7
        p = ActivationParams(2.0, 0.7, 0.3)
        F = Quadratic(1)
        x, d = 1.7, 1e-6
        fd = (scalar_coefficient(p, F.value([x + d])) - scalar_coefficient(p, F.value([x - d]))) / (2 * d)
        g = coefficient_gradient(p, F.value([x]), F.gradient([x]))
        assert g[0] == pytest.approx(fd, rel=1e-8)

    def test_lambda_zero(self):
        g = coefficient_gradient(ActivationParams(0.0, 9.0, -5.0), 3.0, np.array([1.0, 2.0]))
        np.testing.assert_array_equal(g, 0.0)

    def test_batched_shape(self):
        p = ActivationParams(1.0, 1.0)
        g = coefficient_gradient(p, np.array([0.5, 2.0, 3.0]), np.ones((3, 4)))
        assert g.shape == (3, 4)

    @settings(max_examples=300, deadline=None)
    @given(lams, thetas, levels, st.floats(-1e4, 1e4), st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=4))
    def test_pathwise_bound(self, lam, theta, c, fval, grad):
        grad = np.array(grad)
        g = coefficient_gradient(ActivationParams(lam, theta, c), fval, grad)
        bound = lam * math.sqrt(2 * theta) * math.exp(-0.5) * np.linalg.norm(grad)
        assert np.linalg.norm(g) <= bound * (1 + 1e-12) + 1e-300

    def test_pathwise_bound_random_points(self):
        rng = np.random.default_rng(5)
        p = ActivationParams(4.0, 2.5, 0.0)
        fval = rng.exponential(1.0, 10_000)
        grad = rng.normal(size=(10_000, 2))
        g = coefficient_gradient(p, fval, grad)
        ratio = np.linalg.norm(g, axis=1) / np.linalg.norm(grad, axis=1)
        assert ratio.max() <= 4.0 * math.sqrt(5.0) * math.exp(-0.5) * (1 + 1e-12)


class TestDrift:
    def test_langevin_limit(self):
        g = np.array([0.3, -2.0])
        np.testing.assert_array_equal(drift(ActivationParams(0.0, 1.0), 2.0, 5.0, g), -g)

    def test_critical_point(self):
        np.testing.assert_array_equal(drift(ActivationParams(3.0, 1.0), 1.0, 5.0, np.zeros(3)), 0.0)

    def test_value(self):
        d = drift(ActivationParams(1.0, 1.0, 0.0), 1.0, 1.0, np.array([1.0]))
        assert d[0] == pytest.approx(-2 + 3 * math.exp(-1), rel=1e-14)

    @pytest.mark.parametrize("beta", [0.0, -1.0])
    def test_rejects_beta(self, beta):
        with pytest.raises(ValueError):
            drift(ActivationParams(), beta, 1.0, np.ones(1))

    def test_coefficients_bundle(self):
        p = ActivationParams(1.0, 1.0, 0.0)
        co = coefficients(p, 2.0, 0.01, 1.0, np.array([1.0]))
        h = 2 - math.exp(-1)
        assert co.h == pytest.approx(h)
        assert co.noise_scale == pytest.approx(math.sqrt(2 / 2.0 * 0.01 * h))
        np.testing.assert_allclose(co.drift, -h + co.grad_h / 2.0)


class TestDetailedBalance:
    def test_langevin_quadratic(self):
        f = Quadratic(1)
        grid = np.linspace(-8, 8, 16001)
        r = detailed_balance_residual(ActivationParams(), f, 1.0, grid)
        flux = np.abs(grid * gibbs_on_grid(f, 1.0, grid))
        assert np.abs(r).max() < 1e-6 * flux.max()

    def test_double_well_relative_residual(self):
        f = DoubleWell()
        p = ActivationParams(1.0, 1.0, 0.5)
        grid = np.arange(-4000, 4001) * 1e-3
        r = detailed_balance_residual(p, f, 2.0, grid)
        fv, g = f.value(grid[:, None]), f.gradient(grid[:, None])
        flux = np.abs(drift(p, 2.0, fv, g)[:, 0] * gibbs_on_grid(f, 2.0, grid))
        assert np.abs(r).max() / flux.max() < 1e-3

    def test_second_order_away_from_kink(self):
        # with c below min F the coefficient is smooth and the residual is O(spacing^2)
        f = DoubleWell()
        p = ActivationParams(5.0, 1.0, -1.0)
        sups = []
        for n in (4001, 8001):
            grid = np.linspace(-4, 4, n)
            sups.append(np.abs(detailed_balance_residual(p, f, 2.0, grid)).max())
        assert sups[0] / sups[1] == pytest.approx(4.0, rel=0.02)

    def test_boundary_mass_rejected(self):
        with pytest.raises(DomainError):
            detailed_balance_residual(ActivationParams(), Quadratic(1), 1.0, np.linspace(-5, 5, 1001))

    @pytest.mark.parametrize("grid", [np.array([]), np.array([0.0, 1.0]), np.array([0.0, 2.0, 1.0]),
                                      np.array([0.0, 1.0, 3.0]), np.zeros((3, 2))])
    def test_bad_grid(self, grid):
        with pytest.raises(ValueError):
            detailed_balance_residual(ActivationParams(), Quadratic(1), 1.0, grid)

    def test_needs_one_dimension(self):
        with pytest.raises(ValueError):
            detailed_balance_residual(ActivationParams(), Quadratic(2), 1.0, np.linspace(-8, 8, 101))
