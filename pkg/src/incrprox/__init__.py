"""Incremental subgradient-proximal methods for finite-sum convex problems.

The package minimizes objectives of the form ``sum_i f_i(x) + h_i(x)``
over a convex set, touching one component pair per iteration: the ``f``
part through its proximal operator, the ``h`` part through a subgradient
step.  Pure subgradient, pure proximal, heavy-ball, and aggregated
gradient updates are special cases of the same loop.
"""

from .core import (
    ComponentPair,
    ConfigurationError,
    ConvergenceError,
    DEFAULT_TOLERANCES,
    EstimationError,
    OracleError,
    Point,
    Problem,
    ProxCapableFunction,
    SubgradientFunction,
    ToleranceConfig,
    ZERO_PROX,
    ZERO_SUBGRADIENT,
    as_point,
    check_subgradient,
    evaluate_total,
)
from .sets import (
    WHOLE_SPACE,
    Ball,
    Box,
    ConstraintSet,
    Halfspace,
    Hyperplane,
    Intersection,
    WholeSpace,
)
from .prox import (
    Rank1QuadraticParams,
    ShrinkageParams,
    interpolated_projection,
    l1_prox_function,
    prox_numeric_fallback,
    prox_rank1_quadratic,
    prox_weighted_norm,
    rank1_quadratic_prox_function,
    set_distance_prox_function,
    shrink,
    weighted_norm_prox_function,
)
from .schedule import (
    OrderingPolicy,
    SplitMix64,
    StepsizeSchedule,
    StepsizeStream,
    next_index,
    next_stepsize,
)
from .engine import (
    OracleLog,
    RunLimits,
    RunState,
    Trace,
    Variant,
    run,
    step_aggregated,
    step_momentum,
    step_variant_A,
    step_variant_B,
    step_variant_C,
)
from .bounds import (
    BoundInputs,
    BoundReport,
    bound_ratio,
    build_report,
    cyclic_error_bound,
    cyclic_iteration_estimate,
    estimate_c,
    randomized_error_bound,
    randomized_expected_iterations,
)
from .penalty import (
    PenaltyLadder,
    build_ladder,
    common_gamma,
    feasibility_step,
    max_penalty_reformulate,
    penalize,
)
from .apps import (
    LassoInstance,
    LassoSplit,
    WeberInstance,
    abs_value_function,
    generate_lasso,
    lasso_problem,
    lasso_step,
    onedim_abs_benchmark,
    quadratic_residual_function,
    weber_distance_function,
    weber_problem,
)

__version__ = "0.1.0"
