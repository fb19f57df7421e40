import numpy as np
import pytest

from incrprox import (
    Ball,
    ComponentPair,
    ConfigurationError,
    Halfspace,
    Intersection,
    PenaltyLadder,
    Problem,
    WHOLE_SPACE,
    build_ladder,
    common_gamma,
    evaluate_total,
    feasibility_step,
    interpolated_projection,
    max_penalty_reformulate,
    penalize,
)
from incrprox.core import SubgradientFunction
from incrprox.oracle import grid_minimize, halfspace_projection


def linear_objective(slope=1.0):
    return SubgradientFunction(value=lambda x: slope * float(x[0]),
                               subgradient=lambda x: np.array([slope]), label="linear")


class TestLadder:
    def test_example_values(self):
        lad = build_ladder(1.0, 3, 0.1)
        np.testing.assert_allclose(lad.gammas, [1.1, 2.2, 4.4])

    def test_single_set_exceeds_lipschitz(self):
        lad = build_ladder(2.0, 1, 0.25)
        assert lad.gammas[0] > 2.0

    def test_strict_domination_with_margin(self):
        L, margin = 1.7, 0.3
        lad = build_ladder(L, 6, margin)
        running = L
        for g in lad.gammas:
            assert g - running >= margin * L - 1e-12
            running += g

    def test_zero_margin_rejected(self):
        with pytest.raises(ConfigurationError):
            build_ladder(1.0, 3, 0.0)

    def test_ladder_type_validates(self):
        with pytest.raises(ConfigurationError):
            PenaltyLadder(L=1.0, gammas=(0.5,), margin=0.1)


class TestExactPenalty:
    # 1-D model: minimize x over x >= 0, written as the halfspace -x <= 0.
    SET = Halfspace([-1.0], 0.0)

    def penalized(self, gamma):
        def phi(x):
            return float(x[0]) + gamma * self.SET.distance(x)

        return phi

    def constrained_grid_min(self):
        def f_or_inf(x):
            return float(x[0]) if self.SET.contains(x, tol=1e-12) else float("inf")

        return grid_minimize(f_or_inf, [-2.0], [2.0], 1e-4)

    def test_sufficient_weight_recovers_constrained_minimizer(self):
        x_pen, _ = grid_minimize(self.penalized(2.0), [-2.0], [2.0], 1e-4)
        x_con, _ = self.constrained_grid_min()
        assert abs(float(x_pen[0]) - float(x_con[0])) <= 1e-4
        assert self.SET.contains(x_pen, tol=1e-4)

    def test_insufficient_weight_escapes(self):
        x_pen, _ = grid_minimize(self.penalized(0.5), [-2.0], [2.0], 1e-4)
        assert float(x_pen[0]) < -1.0  # runs to the box edge, far outside the set

    def test_two_set_ladder_instance(self):
        # minimize x1 + x2 over {x1 >= 0} and {x2 >= 0.25}; optimum (0, 0.25).
        s1, s2 = Halfspace([-1.0, 0.0], 0.0), Halfspace([0.0, -1.0], -0.25)
        lad = build_ladder(np.sqrt(2.0), 2, 0.2)

        def phi(x):
            return (float(x[0] + x[1]) + lad.gammas[0] * s1.distance(x)
                    + lad.gammas[1] * s2.distance(x))

        x_pen, _ = grid_minimize(phi, [-1.0, -1.0], [1.0, 1.0], 1e-3, refine=True)
        np.testing.assert_allclose(x_pen, [0.0, 0.25], atol=2e-3)

    def test_penalize_builds_unconstrained_problem(self):
        comp = ComponentPair(subgrad_part=linear_objective())
        base = Problem(components=(comp,), constraint=Intersection([self.SET]), dim=1)
        pen = penalize(base, lipschitz=1.0, margin=0.1)
        assert pen.constraint is WHOLE_SPACE
        assert pen.m == 2
        inside = np.array([1.5])
        assert evaluate_total(pen, inside) == pytest.approx(evaluate_total(base, inside))
        outside = np.array([-1.0])
        gamma = common_gamma(1.0, 1, 0.1)
        assert evaluate_total(pen, outside) == pytest.approx(-1.0 + gamma * 1.0)

    def test_penalize_requires_weights_or_lipschitz(self):
        comp = ComponentPair(subgrad_part=linear_objective())
        base = Problem(components=(comp,), constraint=Intersection([self.SET]), dim=1)
        with pytest.raises(ConfigurationError):
            penalize(base)


class TestFeasibilityStep:
    def test_pure_interpolated_projection_when_parts_vanish(self, rng):
        hs = Halfspace([1.0, 1.0], 0.5)
        for _ in range(20):
            x = rng.normal(0.0, 2.0, size=2)
            gamma, alpha = float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.1, 1.0))
            got = feasibility_step(x, ComponentPair(), hs, gamma, alpha)
            want = interpolated_projection(x, hs, gamma, alpha)
            np.testing.assert_array_equal(got, want)

    def test_saturated_weights_reproduce_cyclic_projections(self, rng):
        # gamma * alpha above the travel distance forces full projections,
        # which must match an independently written alternating-projection
        # loop step for step.
        specs = [([1.0, 0.3], 0.2), ([-0.5, 1.0], 0.4)]
        sets = [Halfspace(a, b) for a, b in specs]
        x = np.array([4.0, -3.0])
        y = x.copy()
        for k in range(40):
            s = k % 2
            x = feasibility_step(x, ComponentPair(), sets[s], gamma=1000.0, alpha=1.0)
            y = halfspace_projection(specs[s][0], specs[s][1], y)
            np.testing.assert_allclose(x, y, atol=1e-12)
        assert max(s.distance(x) for s in sets) <= 1e-6

    def test_composed_run_approaches_constrained_minimum(self):
        # minimize ||x||^2 over a ball excluding the origin; compare against
        # a grid search on the penalized objective.
        ball = Ball([3.0, 0.0], 1.0)
        quad = SubgradientFunction(value=lambda x: float(x @ x),
                                   subgradient=lambda x: 2.0 * x)
        comp = ComponentPair(subgrad_part=quad)
        gamma = 10.0
        x = np.array([5.0, 2.0])
        for k in range(4000):
            alpha = 0.5 / (k + 1)
            x = feasibility_step(x, comp, ball, gamma, alpha)

        def phi(p):
            return float(p @ p) + gamma * ball.distance(p)

        ref, ref_val = grid_minimize(phi, [1.0, -1.0], [4.0, 1.0], 1e-4, refine=True)
        np.testing.assert_allclose(x, [2.0, 0.0], atol=1e-2)
        np.testing.assert_allclose(x, ref, atol=1e-2)
        assert phi(x) <= ref_val + 1e-2


class TestMaxPenalty:
    def test_feasible_point_contributes_nothing(self):
        g = linear_objective()  # g(x) = x <= 0 constraint
        comps = max_penalty_reformulate([g], c=2.0)
        x = np.array([-1.0])
        assert comps[0].subgrad_part.value(x) == 0.0
        np.testing.assert_array_equal(comps[0].subgrad_part.subgradient(x), [0.0])

    def test_active_linear_constraint(self):
        g = SubgradientFunction(value=lambda x: float(x[0]) - 1.0,
                                subgradient=lambda x: np.array([1.0]))
        comps = max_penalty_reformulate([g], c=2.0)
        x = np.array([3.0])
        assert comps[0].subgrad_part.value(x) == 4.0
        np.testing.assert_array_equal(comps[0].subgrad_part.subgradient(x), [2.0])

    def test_boundary_uses_zero_subgradient(self):
        g = SubgradientFunction(value=lambda x: float(x[0]),
                                subgradient=lambda x: np.array([1.0]))
        comps = max_penalty_reformulate([g], c=3.0)
        np.testing.assert_array_equal(
            comps[0].subgrad_part.subgradient(np.array([0.0])), [0.0]
        )

    def test_quadratic_with_lower_bound_is_exact(self):
        # minimize x^2 subject to x >= 1 via 3 * max(0, 1 - x).
        g = SubgradientFunction(value=lambda x: 1.0 - float(x[0]),
                                subgradient=lambda x: np.array([-1.0]))
        comps = max_penalty_reformulate([g], c=3.0)
        hinge = comps[0].subgrad_part

        def phi(x):
            return float(x[0]) ** 2 + hinge.value(x)

        x_pen, _ = grid_minimize(phi, [-2.0], [2.0], 1e-4)
        assert abs(float(x_pen[0]) - 1.0) <= 1e-4

    def test_rejects_nonpositive_scale(self):
        with pytest.raises(ConfigurationError):
            max_penalty_reformulate([linear_objective()], c=0.0)
