"""Problem model shared by every solver in the package.

The objective being minimized is an ordered sum of component pairs.  Each
pair couples a part that is cheap to handle with a proximal step (``f``)
with a part that is cheap to handle with a subgradient step (``h``); either
part may be the constant zero.  Iterates are dense float64 vectors and the
feasible region is a :class:`~incrprox.sets.ConstraintSet`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .sets import ConstraintSet

Point = np.ndarray


class ConfigurationError(ValueError):
    """A problem, algorithm, or config parameter is inconsistent or invalid."""


class ConvergenceError(RuntimeError):
    """An inner iterative solve exhausted its step cap.

    Carries the last optimality residual observed so callers can decide
    whether the partial answer is still usable.
    """

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class OracleError(RuntimeError):
    """A reference solver could not bracket or certify its answer."""


class EstimationError(ValueError):
    """An empirical estimate was requested from insufficient data."""


@dataclass(frozen=True)
class ToleranceConfig:
    """Numeric tolerances, passed explicitly wherever they matter.

    Attributes
    ----------
    oracle:
        Agreement tolerance against numeric reference solvers.
    projection:
        Tolerance for set membership and projection idempotence checks.
    subgradient_slack:
        Allowed slack when verifying the subgradient inequality.
    """

    oracle: float = 1e-8
    projection: float = 1e-10
    subgradient_slack: float = 1e-9


DEFAULT_TOLERANCES = ToleranceConfig()


def as_point(coords: Sequence[float] | np.ndarray) -> Point:
    """Coerce ``coords`` to a finite 1-D float64 vector.

    Raises
    ------
    ConfigurationError
        If the input is not one-dimensional or contains non-finite entries.
    """
    x = np.asarray(coords, dtype=float)
    if x.ndim != 1:
        raise ConfigurationError(f"a point must be a 1-D vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ConfigurationError("point coordinates must all be finite")
    return x


@dataclass(frozen=True)
class SubgradientFunction:
    """A convex function exposed through value and subgradient oracles.

    ``subgradient(x)`` may return any element of the subdifferential at
    ``x``; the selections used by the bundled functions are deterministic
    (zero at kinks) so runs replay exactly.
    """

    value: Callable[[Point], float]
    subgradient: Callable[[Point], Point]
    label: str = ""


@dataclass(frozen=True)
class ProxCapableFunction:
    """A convex function exposed through value and proximal oracles.

    ``prox(center, alpha, constraint)`` returns the minimizer of
    ``value(z) + ||z - center||^2 / (2 * alpha)`` over the constraint set
    (the whole space when ``constraint`` is ``None``).  ``subgradient`` is
    optional and only consulted by numeric fallbacks and diagnostics.
    """

    value: Callable[[Point], float]
    prox: Callable[[Point, float, "ConstraintSet | None"], Point]
    subgradient: Optional[Callable[[Point], Point]] = None
    label: str = ""


def _zero_value(x: Point) -> float:
    return 0.0


def _zero_prox(center: Point, alpha: float, constraint: "ConstraintSet | None" = None) -> Point:
    if constraint is None:
        return center
    return constraint.project(center)


ZERO_SUBGRADIENT = SubgradientFunction(
    value=_zero_value, subgradient=np.zeros_like, label="zero"
)

ZERO_PROX = ProxCapableFunction(
    value=_zero_value, prox=_zero_prox, subgradient=np.zeros_like, label="zero"
)


@dataclass(frozen=True)
class ComponentPair:
    """One summand of the objective, split into prox and subgradient parts."""

    prox_part: ProxCapableFunction = ZERO_PROX
    subgrad_part: SubgradientFunction = ZERO_SUBGRADIENT
    label: str = ""

    def value(self, x: Point) -> float:
        return self.prox_part.value(x) + self.subgrad_part.value(x)

    @staticmethod
    def from_subgradient(fn: SubgradientFunction, label: str = "") -> "ComponentPair":
        return ComponentPair(subgrad_part=fn, label=label or fn.label)

    @staticmethod
    def from_prox(fn: ProxCapableFunction, label: str = "") -> "ComponentPair":
        return ComponentPair(prox_part=fn, label=label or fn.label)


@dataclass(frozen=True)
class Problem:
    """A finite-sum convex program over a constraint set.

    Attributes
    ----------
    components:
        Ordered component pairs; the objective is their sum.
    constraint:
        Feasible region.
    dim:
        Dimension every iterate and oracle argument must have.
    optimal_value:
        Known optimal value, for diagnostics only.
    optimal_set:
        Projector onto the optimal solution set, for diagnostics only.
    """

    components: tuple[ComponentPair, ...]
    constraint: "ConstraintSet"
    dim: int
    optimal_value: Optional[float] = None
    optimal_set: Optional["ConstraintSet"] = None

    def __post_init__(self):
        if len(self.components) < 1:
            raise ConfigurationError("a problem needs at least one component")
        if self.dim < 1:
            raise ConfigurationError("problem dimension must be positive")
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def m(self) -> int:
        return len(self.components)

    def distance_to_optimum(self, x: Point) -> Optional[float]:
        if self.optimal_set is None:
            return None
        return self.optimal_set.distance(x)


def evaluate_total(problem: Problem, x: Point) -> float:
    """Exact objective value: the sum of every component at ``x``."""
    if x.shape != (problem.dim,):
        raise ConfigurationError(
            f"point has shape {x.shape}, problem expects ({problem.dim},)"
        )
    total = 0.0
    for comp in problem.components:
        total += comp.prox_part.value(x) + comp.subgrad_part.value(x)
    return total


def check_subgradient(
    fn: SubgradientFunction,
    x: Point,
    samples: Sequence[Point],
    tol: float = DEFAULT_TOLERANCES.subgradient_slack,
) -> bool:
    """Verify the subgradient inequality at ``x`` against sample points.

    Returns True iff ``fn.value(y) >= fn.value(x) + <g, y - x> - tol`` for
    every sample ``y``, where ``g = fn.subgradient(x)``.  An empty sample
    list passes vacuously.
    """
    g = fn.subgradient(x)
    fx = fn.value(x)
    for y in samples:
        if fn.value(y) < fx + float(np.dot(g, y - x)) - tol:
            return False
    return True
