"""Closed-form error ceilings and iteration estimates for constant stepsizes.

With a constant stepsize ``alpha``, ``m`` components, and component
subgradient norms bounded by ``c``, the running minimum of the objective
is guaranteed to come within a computable gap of the optimal value:

* cyclic order:     ``alpha * (1/m + 4) * m^2 * c^2 / 2``
* uniform sampling: ``alpha * 5 * m * c^2 / 2``

The uniform-sampling ceiling is smaller by a factor that grows linearly
with ``m``, which is the main quantitative argument for randomizing the
component order.  Companion estimates bound how many iterations are needed
to get within ``epsilon`` of the respective ceiling.  The constant ``c``
is a property of the whole trajectory; ``estimate_c`` recovers it
empirically from the oracle norms recorded during a run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import ConfigurationError, EstimationError
from .engine import OracleLog


@dataclass(frozen=True)
class BoundInputs:
    """Quantities the gap ceilings and iteration estimates depend on."""

    alpha: float
    m: int
    c: float
    dist0: float = 0.0
    epsilon: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0 or self.m < 1 or self.c <= 0 or self.epsilon <= 0:
            raise ConfigurationError("alpha, m, c, epsilon must be positive")
        if self.dist0 < 0:
            raise ConfigurationError("dist0 must be nonnegative")


@dataclass(frozen=True)
class BoundReport:
    """Evaluated ceilings next to what a run actually achieved."""

    cyclic_bound: float
    randomized_bound: float
    cyclic_N: Optional[int]
    randomized_EN: Optional[float]
    observed_gap: Optional[float] = None
    c_source: str = "user"

    def to_dict(self) -> dict:
        return {
            "cyclic_bound": self.cyclic_bound,
            "randomized_bound": self.randomized_bound,
            "cyclic_N": self.cyclic_N,
            "randomized_EN": self.randomized_EN,
            "observed_gap": self.observed_gap,
            "c_source": self.c_source,
        }


def cyclic_error_bound(b: BoundInputs) -> float:
    """Gap ceiling for cyclic order: ``alpha * (1/m + 4) * m^2 * c^2 / 2``."""
    beta = 1.0 / b.m + 4.0
    return b.alpha * beta * b.m * b.m * b.c * b.c / 2.0


def randomized_error_bound(b: BoundInputs) -> float:
    """Gap ceiling for uniform sampling: ``alpha * 5 * m * c^2 / 2``."""
    return b.alpha * 5.0 * b.m * b.c * b.c / 2.0


def bound_ratio(m: int) -> float:
    """Cyclic over randomized ceiling at equal inputs: ``(1/m + 4) * m / 5``."""
    return (1.0 / m + 4.0) * m / 5.0


def cyclic_iteration_estimate(b: BoundInputs) -> int:
    """Iterations guaranteeing the cyclic ceiling plus ``epsilon/2`` slack.

    ``m * floor(dist0^2 / (alpha * epsilon))``: after that many iterations
    the running minimum satisfies the cyclic ceiling inflated by half an
    epsilon.
    """
    ratio = b.dist0 * b.dist0 / (b.alpha * b.epsilon)
    # The nudge keeps exact integer ratios from dropping a whole cycle to
    # float rounding in the division.
    return b.m * math.floor(ratio * (1.0 + 1e-12))


def randomized_expected_iterations(b: BoundInputs) -> float:
    """Expected-iteration analogue under uniform sampling (no floor).

    Bounds the mean of the random iteration count, not its realization, so
    empirical checks against it are soft.
    """
    return b.m * b.dist0 * b.dist0 / (b.alpha * b.epsilon)


def estimate_c(log: OracleLog) -> float:
    """Largest oracle norm recorded during a run.

    Covers both direct subgradient norms and the gradients recovered from
    proximal displacements.  An empirical stand-in: reports quoting it
    should flag that the ceilings use a measured constant.
    """
    if log.n_calls == 0:
        raise EstimationError("no oracle calls recorded; cannot estimate c")
    return log.max_norm


def build_report(
    inputs: BoundInputs,
    observed_gap: Optional[float] = None,
    c_source: str = "user",
    with_estimates: bool = True,
) -> BoundReport:
    """Assemble the ceilings and estimates, omitting what lacks inputs."""
    report = BoundReport(
        cyclic_bound=cyclic_error_bound(inputs),
        randomized_bound=randomized_error_bound(inputs),
        cyclic_N=cyclic_iteration_estimate(inputs) if with_estimates else None,
        randomized_EN=randomized_expected_iterations(inputs) if with_estimates else None,
        observed_gap=observed_gap,
        c_source=c_source,
    )
    if inputs.m >= 2 and report.randomized_bound > report.cyclic_bound:
        raise ConfigurationError("ceiling ordering violated; inputs are inconsistent")
    return report
