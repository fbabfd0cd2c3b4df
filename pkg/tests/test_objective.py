"""Objective functions: values, gradients, finite differences and the counting wrapper."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from adavol.objective import (
    CountingObjective,
    DoubleWell,
    FunctionObjective,
    Quadratic,
    ShiftedRastrigin,
    eval_gradient,
    eval_objective,
    finite_difference_gradient,
)


def rastrigin_by_hand(x, shift=2.0, amp=5.0):
    # written out term by term, independent of the vectorised class
    total = amp * len(x)
    for xk in x:
        total += (xk - shift) ** 2 - amp * math.cos(2 * math.pi * (xk - shift))
    return total


class TestEvaluation:
    def test_rastrigin_optimum_is_zero(self):
        assert eval_objective(ShiftedRastrigin(2), np.array([2.0, 2.0])) == 0.0

    def test_rastrigin_at_origin_1d(self):
        # 5 + 4 - 5 cos(-4 pi)
        assert eval_objective(ShiftedRastrigin(1), np.array([0.0])) == pytest.approx(4.0, abs=1e-12)

    def test_quadratic_minimum(self):
        assert eval_objective(Quadratic(3), np.zeros(3)) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            eval_objective(ShiftedRastrigin(2), np.zeros(3))
        with pytest.raises(ValueError):
            eval_gradient(Quadratic(2), np.zeros(1))

    def test_batch_matches_pointwise(self):
        f = ShiftedRastrigin(3)
        x = np.random.default_rng(0).uniform(-10, 10, size=(7, 3))
        batch = f.value(x)
        assert batch.shape == (7,)
        for row, v in zip(x, batch):
            assert v == pytest.approx(rastrigin_by_hand(row), rel=1e-13, abs=1e-12)

    def test_double_well_optimum(self):
        f = DoubleWell(tilt=0.05)
        left, barrier, right = f.minimizers()
        assert left < barrier < right
        assert f.known_optimum == pytest.approx(f.value([left]), abs=1e-12)
        assert f.value([left]) < f.value([right])


class TestGradient:
    def test_rastrigin_gradient_vanishes_at_optimum(self):
        np.testing.assert_array_equal(eval_gradient(ShiftedRastrigin(2), np.array([2.0, 2.0])), [0.0, 0.0])

    def test_quadratic_gradient(self):
        np.testing.assert_array_equal(eval_gradient(Quadratic(2), np.array([3.0, -1.0])), [3.0, -1.0])

    def test_rastrigin_gradient_quarter_period(self):
        g = eval_gradient(ShiftedRastrigin(1), np.array([2.25]))
        assert g[0] == pytest.approx(0.5 + 10 * math.pi, rel=1e-14)

    def test_fd_quadratic(self):
        g = finite_difference_gradient(Quadratic(2), np.array([1.0, 0.0]), 1e-5)
        np.testing.assert_allclose(g, [1.0, 0.0], atol=1e-9)

    def test_fd_rastrigin(self):
        f = ShiftedRastrigin(1)
        x = np.array([2.25])
        np.testing.assert_allclose(finite_difference_gradient(f, x, 1e-5), eval_gradient(f, x), rtol=1e-5)

    @pytest.mark.parametrize("h", [0.0, -1e-3])
    def test_fd_rejects_nonpositive_step(self, h):
        with pytest.raises(ValueError):
            finite_difference_gradient(Quadratic(1), np.array([1.0]), h)

    @pytest.mark.parametrize("f", [ShiftedRastrigin(1), ShiftedRastrigin(2), ShiftedRastrigin(3),
                                   Quadratic(2, L=2.5), DoubleWell(0.05)],
                             ids=repr)
    def test_fd_agrees_at_random_points(self, f):
        rng = np.random.default_rng(42)
        for x in rng.uniform(-10, 10, size=(100, f.dimension)):
            g = eval_gradient(f, x)
            fd = finite_difference_gradient(f, x, 1e-5)
            assert np.linalg.norm(fd - g) <= 1e-5 * max(np.linalg.norm(g), 1.0)

    def test_function_objective_fd_fallback(self):
        f = FunctionObjective(lambda x: float(np.sum(np.sin(x))), 2)
        x = np.array([0.3, -1.2])
        np.testing.assert_allclose(f.gradient(x), np.cos(x), rtol=1e-9)

    def test_function_objective_rejects_bad_step(self):
        with pytest.raises(ValueError):
            FunctionObjective(lambda x: 0.0, 1, fd_step=0.0)


class TestRastriginProperties:
    def test_smoothness_constant(self):
        assert ShiftedRastrigin(2).smoothness_L == pytest.approx(2 + 20 * math.pi ** 2)

    @settings(max_examples=200, deadline=None)
    @given(arrays(np.float64, 2, elements=st.floats(-1e3, 1e3)))
    def test_nonnegative(self, x):
        assert ShiftedRastrigin(2).value(x) >= -1e-9

    @settings(max_examples=200, deadline=None)
    @given(arrays(np.float64, 3, elements=st.floats(-50, 50)))
    def test_reflection_symmetry(self, x):
        f = ShiftedRastrigin(3)
        assert f.value(2 * 2.0 - x) == pytest.approx(f.value(x), rel=1e-9, abs=1e-9)

    def test_hessian_diagonal_within_L(self):
        f = ShiftedRastrigin(2)
        x = np.random.default_rng(3).uniform(-10, 10, size=(1000, 2))
        h = 1e-4
        numeric = np.stack([(f.gradient(x + h * e)[:, i] - f.gradient(x - h * e)[:, i]) / (2 * h)
                            for i, e in enumerate(np.eye(2))], axis=1)
        assert np.abs(numeric).max() <= f.smoothness_L + 1e-6
        np.testing.assert_allclose(f.hessian_diagonal(x), numeric, atol=1e-4)

    @settings(max_examples=100, deadline=None)
    @given(arrays(np.float64, 1, elements=st.floats(-30, 30)))
    def test_known_optimum_is_lower_bound(self, x):
        for f in (ShiftedRastrigin(1), Quadratic(1), DoubleWell(0.05)):
            assert f.value(x) >= f.known_optimum - 1e-12


class TestCounting:
    def test_counts_rows(self):
        f = CountingObjective(Quadratic(2))
        f.value(np.zeros((5, 2)))
        f.gradient(np.zeros((3, 2)))
        f.gradient(np.zeros(2))
        assert (f.value_calls, f.gradient_calls) == (5, 4)

    def test_delegates_metadata(self):
        f = CountingObjective(ShiftedRastrigin(2))
        assert f.dimension == 2
        assert f.known_optimum == 0.0
        assert f.smoothness_L == ShiftedRastrigin(2).smoothness_L
