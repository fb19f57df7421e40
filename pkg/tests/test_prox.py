import numpy as np
import pytest

from incrprox import (
    ConfigurationError,
    Halfspace,
    Rank1QuadraticParams,
    interpolated_projection,
    prox_numeric_fallback,
    prox_rank1_quadratic,
    prox_weighted_norm,
    set_distance_prox_function,
    shrink,
)
from incrprox.core import SubgradientFunction
from incrprox.oracle import grid_minimize, numeric_prox_1d

from conftest import provided_prox_operators


class TestShrink:
    def test_zero_fixed_point(self):
        np.testing.assert_array_equal(shrink(np.zeros(3), 2.0, 0.5), np.zeros(3))

    def test_branches(self):
        got = shrink(np.array([3.0, -0.5, -4.0]), 2.0, 0.5)
        np.testing.assert_allclose(got, [2.0, 0.0, -3.0])

    def test_boundary_maps_to_zero(self):
        got = shrink(np.array([1.0, -1.0]), 2.0, 0.5)
        np.testing.assert_allclose(got, [0.0, 0.0])

    def test_matches_golden_section(self):
        got = shrink(np.array([1.0]), 1.0, 1.0)
        want = numeric_prox_1d(abs, 1.0, 1.0, tol=1e-9, slope_bound=1.0)
        assert abs(float(got[0]) - want) <= 1e-8
        assert float(got[0]) == 0.0

    def test_firmly_nonexpansive(self, rng):
        for _ in range(500):
            u = rng.normal(0.0, 2.0, size=4)
            v = rng.normal(0.0, 2.0, size=4)
            du = shrink(u, 0.7, 0.9)
            dv = shrink(v, 0.7, 0.9)
            assert np.linalg.norm(du - dv) <= np.linalg.norm(u - v) + 1e-15

    def test_rejects_bad_params(self):
        with pytest.raises(ConfigurationError):
            shrink(np.zeros(1), 0.0, 1.0)
        with pytest.raises(ConfigurationError):
            shrink(np.zeros(1), 1.0, -1.0)


class TestRank1Quadratic:
    def test_zero_direction_is_identity(self):
        p = Rank1QuadraticParams(np.zeros(2), 1.0)
        x = np.array([2.0, 3.0])
        np.testing.assert_array_equal(prox_rank1_quadratic(x, p, 1.0), x)

    def test_axis_case(self):
        p = Rank1QuadraticParams(np.array([1.0, 0.0]), 0.0)
        got = prox_rank1_quadratic(np.array([2.0, 3.0]), p, 1.0)
        np.testing.assert_allclose(got, [1.0, 3.0])

    def test_zero_residual_fixed(self):
        p = Rank1QuadraticParams(np.array([1.0, 1.0]), 2.0)
        x = np.array([1.0, 1.0])
        np.testing.assert_allclose(prox_rank1_quadratic(x, p, 1.0), x)

    def test_matches_linear_solve(self, rng):
        # Stationarity: (I + alpha c c') z = x + alpha d c, solved densely.
        for _ in range(100):
            c = rng.normal(0.0, 1.0, size=3)
            d = float(rng.normal())
            alpha = float(rng.uniform(0.1, 2.0))
            x = rng.normal(0.0, 1.0, size=3)
            want = np.linalg.solve(np.eye(3) + alpha * np.outer(c, c), x + alpha * d * c)
            got = prox_rank1_quadratic(x, Rank1QuadraticParams(c, d), alpha)
            np.testing.assert_allclose(got, want, atol=1e-12)


class TestWeightedNorm:
    def test_center_fixed(self):
        center = np.array([1.0, -1.0])
        np.testing.assert_array_equal(prox_weighted_norm(center.copy(), center, 1.0, 1.0), center)

    def test_radial_shrink(self):
        got = prox_weighted_norm(np.array([3.0, 4.0]), np.zeros(2), 1.0, 1.0)
        np.testing.assert_allclose(got, [2.4, 3.2])

    def test_collapse_when_step_dominates(self):
        got = prox_weighted_norm(np.array([3.0, 4.0]), np.zeros(2), 1.0, 10.0)
        np.testing.assert_allclose(got, [0.0, 0.0])

    def test_matches_grid_oracle(self, rng):
        for _ in range(5):
            x = rng.normal(0.0, 1.0, size=2)
            w = float(rng.uniform(0.3, 1.5))
            alpha = float(rng.uniform(0.2, 1.0))
            got = prox_weighted_norm(x, np.zeros(2), w, alpha)

            def objective(p):
                return w * np.linalg.norm(p) + np.dot(p - x, p - x) / (2 * alpha)

            ref, _ = grid_minimize(objective, x - 2.0, x + 2.0, 1e-5, refine=True)
            np.testing.assert_allclose(got, ref, atol=1e-4)


class TestInterpolatedProjection:
    HS = Halfspace([1.0, 0.0], 0.0)

    def test_inside_untouched(self):
        x = np.array([-1.0, 2.0])
        assert interpolated_projection(x, self.HS, 1.0, 1.0) is x

    def test_partial_interpolation(self):
        got = interpolated_projection(np.array([2.0, 1.0]), self.HS, 1.0, 1.0)
        np.testing.assert_allclose(got, [1.0, 1.0])

    def test_full_projection_when_weight_saturates(self):
        got = interpolated_projection(np.array([2.0, 1.0]), self.HS, 3.0, 1.0)
        np.testing.assert_allclose(got, [0.0, 1.0])

    def test_matches_grid_oracle(self, rng):
        for _ in range(5):
            x = rng.normal(0.0, 1.5, size=2)
            gamma = float(rng.uniform(0.3, 1.5))
            alpha = float(rng.uniform(0.2, 1.0))
            got = interpolated_projection(x, self.HS, gamma, alpha)

            def objective(p):
                return gamma * self.HS.distance(p) + np.dot(p - x, p - x) / (2 * alpha)

            ref, _ = grid_minimize(objective, x - 2.5, x + 2.5, 1e-6, refine=True)
            np.testing.assert_allclose(got, ref, atol=1e-5)


class TestNumericFallback:
    def test_zero_function_projects(self):
        zero = SubgradientFunction(value=lambda x: 0.0, subgradient=np.zeros_like)
        center = np.array([2.0, 1.0])
        hs = Halfspace([1.0, 0.0], 0.0)
        got = prox_numeric_fallback(zero, center, 0.5, hs, tol=1e-10)
        np.testing.assert_allclose(got, [0.0, 1.0], atol=1e-9)
        free = prox_numeric_fallback(zero, center, 0.5, None, tol=1e-10)
        np.testing.assert_array_equal(free, center)

    def test_matches_shrink(self, rng):
        for _ in range(30):
            gamma = float(rng.uniform(0.2, 0.8))
            alpha = float(rng.uniform(0.02, 0.15))
            thr = gamma * alpha
            x = rng.normal(0.0, 1.0, size=1)
            while abs(abs(float(x[0])) - thr) < 0.2 * thr:
                x = rng.normal(0.0, 1.0, size=1)
            fn = SubgradientFunction(
                value=lambda t, g=gamma: g * abs(float(t[0])),
                subgradient=lambda t, g=gamma: g * np.sign(t),
            )
            got = prox_numeric_fallback(fn, x, alpha, None, tol=1e-6)
            want = shrink(x, gamma, alpha)
            assert np.abs(got - want).max() <= 1e-5

    def test_matches_interpolated_projection(self, rng):
        hs = Halfspace([0.6, -0.8], 0.1)
        for _ in range(30):
            gamma = float(rng.uniform(0.2, 0.8))
            alpha = float(rng.uniform(0.05, 0.4))
            x = rng.normal(0.0, 1.0, size=2)
            fn = set_distance_prox_function(hs, gamma)
            got = prox_numeric_fallback(
                SubgradientFunction(fn.value, fn.subgradient), x, alpha, None, tol=2e-6
            )
            want = interpolated_projection(x, hs, gamma, alpha)
            assert np.linalg.norm(got - want) <= 1e-5


@pytest.mark.parametrize("name,fn,dim", provided_prox_operators(), ids=lambda v: str(v))
def test_three_point_inequality(name, fn, dim, rng):
    # For z = prox(x) and any y: |z-y|^2 <= |x-y|^2 - 2a(f(z) - f(y)).
    for _ in range(1000):
        alpha = float(rng.uniform(0.1, 1.5))
        x = rng.normal(0.0, 2.0, size=dim)
        y = rng.normal(0.0, 2.0, size=dim)
        z = fn.prox(x, alpha, None)
        lhs = float(np.dot(z - y, z - y))
        rhs = float(np.dot(x - y, x - y)) - 2 * alpha * (fn.value(z) - fn.value(y))
        assert lhs <= rhs + 1e-8, name


@pytest.mark.parametrize("name,fn,dim", provided_prox_operators(), ids=lambda v: str(v))
def test_prox_step_recovers_a_subgradient(name, fn, dim, rng):
    # g = (x - z)/alpha is a subgradient of the function at z.
    view = SubgradientFunction(value=fn.value, subgradient=fn.subgradient)
    for _ in range(100):
        alpha = float(rng.uniform(0.1, 1.5))
        x = rng.normal(0.0, 2.0, size=dim)
        z = fn.prox(x, alpha, None)
        g = (x - z) / alpha
        fz = fn.value(z)
        for _ in range(10):
            y = rng.normal(0.0, 2.0, size=dim)
            assert fn.value(y) >= fz + float(np.dot(g, y - z)) - 1e-8, name


def test_closed_forms_agree_with_fallback_sample(rng):
    # A light version of the 200-instance acceptance sweep.
    for _ in range(20):
        c = rng.normal(0.0, 1.0, size=2)
        d = float(rng.normal())
        alpha = float(rng.uniform(0.02, 0.2))
        x = rng.normal(0.0, 1.0, size=2)
        fn = SubgradientFunction(
            value=lambda t, c=c, d=d: 0.5 * (float(c @ t) - d) ** 2,
            subgradient=lambda t, c=c, d=d: c * (float(c @ t) - d),
        )
        got = prox_numeric_fallback(fn, x, alpha, None, tol=1e-10)
        want = prox_rank1_quadratic(x, Rank1QuadraticParams(c, d), alpha)
        assert np.linalg.norm(got - want) <= 1e-5
