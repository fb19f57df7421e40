import numpy as np
import pytest

from incrprox import (
    ComponentPair,
    ConfigurationError,
    LassoInstance,
    Problem,
    WHOLE_SPACE,
    abs_value_function,
    as_point,
    check_subgradient,
    evaluate_total,
    lasso_problem,
)
from incrprox.core import SubgradientFunction

from conftest import provided_subgradient_functions


def abs_problem(bs):
    comps = tuple(ComponentPair.from_subgradient(abs_value_function(b)) for b in bs)
    return Problem(components=comps, constraint=WHOLE_SPACE, dim=1)


class TestEvaluateTotal:
    def test_single_abs(self):
        p = abs_problem([0.0])
        assert evaluate_total(p, np.array([-2.0])) == 2.0

    def test_three_abs(self):
        p = abs_problem([0.0, 1.0, 2.0])
        assert evaluate_total(p, np.array([1.0])) == 2.0

    def test_lasso_at_zero_matches_direct_sum(self, rng):
        rows = tuple((rng.standard_normal(3), float(rng.standard_normal())) for _ in range(5))
        p = lasso_problem(LassoInstance(rows=rows, gamma=0.7))
        x = np.zeros(3)
        direct = 0.5 * sum(d * d for _, d in rows)
        assert evaluate_total(p, x) == pytest.approx(direct, abs=1e-15)

    def test_dimension_mismatch(self):
        p = abs_problem([0.0])
        with pytest.raises(ConfigurationError):
            evaluate_total(p, np.array([1.0, 2.0]))


class TestCheckSubgradient:
    def test_abs_at_kink_zero_selection(self):
        fn = abs_value_function(0.0)
        samples = [np.array([-1.0]), np.array([1.0])]
        assert check_subgradient(fn, np.array([0.0]), samples, tol=1e-12)

    def test_invalid_slope_rejected(self):
        fn = SubgradientFunction(
            value=lambda x: abs(float(x[0])),
            subgradient=lambda x: np.array([2.0]),
        )
        assert not check_subgradient(fn, np.array([0.0]), [np.array([1.0])], tol=1e-12)

    def test_hinge_interior_subdifferential_element(self):
        fn = SubgradientFunction(
            value=lambda x: max(0.0, float(x[0])),
            subgradient=lambda x: np.array([0.5]),
        )
        samples = [np.array([-1.0]), np.array([1.0])]
        assert check_subgradient(fn, np.array([0.0]), samples, tol=1e-12)

    def test_empty_samples_pass(self):
        assert check_subgradient(abs_value_function(0.0), np.array([1.0]), [], tol=0.0)


def test_every_bundled_function_satisfies_subgradient_inequality(rng):
    for fn, dim in provided_subgradient_functions():
        for _ in range(1000):
            x = rng.normal(0.0, 2.0, size=dim)
            samples = [rng.normal(0.0, 2.0, size=dim) for _ in range(10)]
            assert check_subgradient(fn, x, samples, tol=1e-9), fn.label


class TestPointValidation:
    def test_as_point_rejects_matrix(self):
        with pytest.raises(ConfigurationError):
            as_point([[1.0, 2.0]])

    def test_as_point_rejects_nan(self):
        with pytest.raises(ConfigurationError):
            as_point([1.0, float("nan")])

    def test_problem_needs_components(self):
        with pytest.raises(ConfigurationError):
            Problem(components=(), constraint=WHOLE_SPACE, dim=1)
