"""Exact-penalty conversion of intersection constraints.

Minimizing an ``L``-Lipschitz function over an intersection of convex sets
is equivalent to unconstrained minimization once each set is replaced by a
distance penalty whose weight is large enough.  A sufficient construction
is a geometric ladder ``gamma_k = (1 + margin) * 2^(k-1) * L``, which
strictly dominates ``L`` plus all earlier weights.  A single common weight
equal to the last rung is a conservative default.

The composed feasibility update treats one penalized set per iteration: a
subgradient step on the ``h`` part, an implicit (proximal) step on the
``f`` part, and the interpolated projection that is the exact prox of the
distance penalty.  With both function parts zero it reduces to the
classical method of cyclic projections.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    ComponentPair,
    ConfigurationError,
    Point,
    Problem,
    SubgradientFunction,
)
from .prox import interpolated_projection, set_distance_prox_function
from .sets import WHOLE_SPACE, ConstraintSet, Intersection


@dataclass(frozen=True)
class PenaltyLadder:
    """Per-set penalty weights dominating the objective's Lipschitz constant."""

    L: float
    gammas: tuple[float, ...]
    margin: float

    def __post_init__(self):
        if self.L <= 0 or self.margin <= 0:
            raise ConfigurationError("L and margin must be positive")
        running = self.L
        for g in self.gammas:
            if g <= running:
                raise ConfigurationError("ladder weights must strictly dominate")
            running += g


def build_ladder(L: float, m: int, margin: float) -> PenaltyLadder:
    """Geometric ladder ``(1 + margin) * 2^(k-1) * L`` for ``k = 1..m``.

    Each rung exceeds ``L`` plus the sum of all earlier rungs by at least
    ``margin * L``; ``margin`` must be strictly positive.
    """
    if L <= 0:
        raise ConfigurationError("Lipschitz constant L must be positive")
    if margin <= 0:
        raise ConfigurationError("margin must be strictly positive")
    if m < 1:
        raise ConfigurationError("need at least one set")
    gammas = tuple((1.0 + margin) * (2.0 ** (k - 1)) * L for k in range(1, m + 1))
    return PenaltyLadder(L=L, gammas=gammas, margin=margin)


def common_gamma(L: float, m: int, margin: float = 0.1) -> float:
    """Single conservative weight: the top rung of the ladder."""
    return build_ladder(L, m, margin).gammas[-1]


def penalize(
    problem: Problem,
    gammas: Optional[Sequence[float]] = None,
    lipschitz: Optional[float] = None,
    margin: float = 0.1,
) -> Problem:
    """Rewrite an intersection-constrained problem as unconstrained.

    Appends one distance-penalty component per member set of the
    constraint (which must be an :class:`Intersection`, or a single set
    treated as one member).  Weights come from ``gammas`` when given;
    otherwise a common conservative weight is derived from ``lipschitz``.
    """
    if isinstance(problem.constraint, Intersection):
        sets = problem.constraint.sets
    else:
        sets = (problem.constraint,)
    if gammas is None:
        if lipschitz is None:
            raise ConfigurationError(
                "penalize needs explicit gammas or a Lipschitz constant for f"
            )
        gamma = common_gamma(lipschitz, len(sets), margin)
        gammas = [gamma] * len(sets)
    if len(gammas) != len(sets):
        raise ConfigurationError("one penalty weight per constraint set is required")

    penalty_components = tuple(
        ComponentPair(
            prox_part=set_distance_prox_function(s, float(g)),
            label=f"penalty:{s.description}",
        )
        for s, g in zip(sets, gammas)
    )
    return Problem(
        components=problem.components + penalty_components,
        constraint=WHOLE_SPACE,
        dim=problem.dim,
        optimal_value=problem.optimal_value,
        optimal_set=problem.optimal_set,
    )


def feasibility_step(
    x_k: Point,
    f_comp: ComponentPair,
    constraint: ConstraintSet,
    gamma: float,
    alpha: float,
) -> Point:
    """One composed update against a single penalized set.

    Subgradient step on the ``h`` part, prox on the ``f`` part over the
    whole space, then the interpolated projection onto the set.  Points
    already inside the set after the prox are left where they are.
    """
    y = x_k - alpha * f_comp.subgrad_part.subgradient(x_k)
    z = f_comp.prox_part.prox(y, alpha, None)
    return interpolated_projection(z, constraint, gamma, alpha)


def max_penalty_reformulate(
    inequalities: Sequence[SubgradientFunction],
    c: float,
) -> list[ComponentPair]:
    """Penalty components ``c * max(0, g_j(x))`` for constraints ``g_j <= 0``.

    The subgradient is ``c`` times the constraint subgradient where the
    constraint is violated and the zero vector elsewhere, including on the
    boundary.
    """
    if c <= 0:
        raise ConfigurationError("penalty scale c must be positive")

    def make(g: SubgradientFunction) -> ComponentPair:
        def value(x: Point) -> float:
            return c * max(0.0, g.value(x))

        def subgradient(x: Point) -> Point:
            if g.value(x) > 0.0:
                return c * g.subgradient(x)
            return np.zeros_like(x)

        fn = SubgradientFunction(value=value, subgradient=subgradient,
                                 label=f"hinge({g.label})")
        return ComponentPair(subgrad_part=fn, label=fn.label)

    return [make(g) for g in inequalities]
