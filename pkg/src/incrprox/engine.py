"""Iteration variants and the run loop with trace recording.

Seven update rules share one loop.  The three combined variants pair a
proximal step on the ``f`` part with a subgradient step on the ``h`` part
of the selected component and differ in where the constraint set enters:

* ``PROX_SUBGRAD``      prox over the set, then projected subgradient step;
* ``PROX_FREE_SUBGRAD`` prox over the whole space, then projected
  subgradient step (the intermediate point may leave the set);
* ``SUBGRAD_PROX``      unprojected subgradient step, then prox over the set.

``SUBGRAD`` and ``PROX`` are the pure special cases (all ``f`` or all
``h`` zero), and ``MOMENTUM`` / ``AGGREGATED`` are the classical gradient
variants for differentiable unconstrained problems: the former adds a
heavy-ball term, the latter descends along the sum of the most recent
gradient of every component.
"""

from __future__ import annotations

import json
import math
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .core import (
    ZERO_PROX,
    ComponentPair,
    ConfigurationError,
    ConvergenceError,
    Point,
    Problem,
    as_point,
    evaluate_total,
)
from .schedule import OrderingPolicy, StepsizeSchedule, StepsizeStream
from .sets import ConstraintSet, is_whole_space

CSV_HEADER = "k,i_k,alpha_k,F,dist_opt,wall_ms"


class Variant(str, Enum):
    PROX_SUBGRAD = "prox_subgrad"
    PROX_FREE_SUBGRAD = "prox_free_subgrad"
    SUBGRAD_PROX = "subgrad_prox"
    SUBGRAD = "subgrad"
    PROX = "prox"
    MOMENTUM = "momentum"
    AGGREGATED = "aggregated"


_GRADIENT_VARIANTS = (Variant.MOMENTUM, Variant.AGGREGATED)


class OracleLog:
    """Append-only record of oracle call norms; keeps the running max."""

    __slots__ = ("max_norm", "n_calls")

    def __init__(self):
        self.max_norm = 0.0
        self.n_calls = 0

    def record(self, norm: float) -> None:
        self.n_calls += 1
        if norm > self.max_norm:
            self.max_norm = norm


@dataclass
class RunLimits:
    """Stopping rules, OR-combined; at least one iteration cap is required."""

    max_iters: Optional[int] = None
    max_cycles: Optional[int] = None
    target_value: Optional[float] = None

    def iteration_cap(self, m: int) -> int:
        caps = []
        if self.max_iters is not None:
            if self.max_iters < 0:
                raise ConfigurationError("max_iters must be nonnegative")
            caps.append(self.max_iters)
        if self.max_cycles is not None:
            if self.max_cycles < 0:
                raise ConfigurationError("max_cycles must be nonnegative")
            caps.append(self.max_cycles * m)
        if not caps:
            raise ConfigurationError("set max_iters or max_cycles")
        return min(caps)


@dataclass
class RunState:
    """Mutable per-run state owned by a single ``run`` invocation."""

    x: Point
    k: int = 0
    prev_x: Optional[Point] = None
    history: deque = field(default_factory=deque)
    policy: Optional[OrderingPolicy] = None
    best_value: float = math.inf
    best_point: Optional[Point] = None


@dataclass
class Trace:
    """Per-iteration records plus everything needed to replay the run.

    ``rows`` holds ``(k, i_k, alpha_k, F, dist_opt, wall_ms)`` tuples with
    ``None`` for absent optional entries; rows are ordered by ``k``.
    """

    metadata: dict
    rows: list
    best_value: float
    best_point: Point
    final_point: Point
    oracle_log: OracleLog
    aborted: Optional[str] = None
    iterates: Optional[list] = None
    prox_points: Optional[list] = None

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for k, i, alpha, value, dist, wall in self.rows:
            lines.append(
                ",".join(
                    [
                        str(k),
                        "" if i is None else str(i),
                        "" if alpha is None else repr(float(alpha)),
                        "" if value is None else repr(float(value)),
                        "" if dist is None else repr(float(dist)),
                        "" if wall is None else repr(float(wall)),
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "metadata": self.metadata,
            "rows": [
                {
                    "k": k,
                    "i_k": i,
                    "alpha_k": alpha,
                    "F": value,
                    "dist_opt": dist,
                    "wall_ms": wall,
                }
                for k, i, alpha, value, dist, wall in self.rows
            ],
            "best_value": self.best_value,
            "best_point": [float(v) for v in self.best_point],
            "final_point": [float(v) for v in self.final_point],
            "oracle_max_norm": self.oracle_log.max_norm,
            "oracle_calls": self.oracle_log.n_calls,
            "aborted": self.aborted,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"


def step_variant_A(x_k: Point, comp: ComponentPair, constraint: ConstraintSet,
                   alpha: float) -> tuple[Point, Point]:
    """Prox over the set, then projected subgradient step; both stay feasible."""
    z, _, x_next = _step_prox_subgrad(x_k, comp, constraint, alpha, free_prox=False)
    return z, x_next


def step_variant_B(x_k: Point, comp: ComponentPair, constraint: ConstraintSet,
                   alpha: float) -> tuple[Point, Point]:
    """Whole-space prox, then projected subgradient step; ``z`` may leave the set."""
    z, _, x_next = _step_prox_subgrad(x_k, comp, constraint, alpha, free_prox=True)
    return z, x_next


def step_variant_C(x_k: Point, comp: ComponentPair, constraint: ConstraintSet,
                   alpha: float) -> tuple[Point, Point]:
    """Unprojected subgradient step, then prox over the set."""
    z, _, x_next = _step_subgrad_prox(x_k, comp, constraint, alpha)
    return z, x_next


def _step_prox_subgrad(x, comp, constraint, alpha, free_prox):
    z = comp.prox_part.prox(x, alpha, None if free_prox else constraint)
    g = comp.subgrad_part.subgradient(z)
    x_next = constraint.project(z - alpha * g)
    return z, g, x_next


def _step_subgrad_prox(x, comp, constraint, alpha):
    g = comp.subgrad_part.subgradient(x)
    z = x - alpha * g
    x_next = comp.prox_part.prox(z, alpha, constraint)
    return z, g, x_next


def step_momentum(state: RunState, comp: ComponentPair, alpha: float,
                  beta: float) -> Point:
    """Heavy-ball update; at the first step the previous iterate is the start."""
    prev = state.prev_x if state.prev_x is not None else state.x
    g = comp.subgrad_part.subgradient(state.x)
    x_next = state.x - alpha * g
    if beta != 0.0:
        x_next = x_next + beta * (state.x - prev)
    return x_next


def step_aggregated(state: RunState, comp: ComponentPair, alpha: float) -> Point:
    """Descend along the sum of the stored window of component gradients.

    The gradient of ``comp`` at the current point enters the window before
    the step.  While the window is still filling (fewer entries than
    components) the stepsize is inflated to ``m * alpha / (k + 1)``.
    """
    m = state.policy.m
    g = comp.subgrad_part.subgradient(state.x)
    state.history.append(g)
    total = state.history[0].copy()
    for item in list(state.history)[1:]:
        total += item
    alpha_eff = alpha if state.k >= m else m * alpha / (state.k + 1)
    return state.x - alpha_eff * total


def _validate(problem: Problem, variant: Variant, ordering: OrderingPolicy,
              momentum_beta: float) -> None:
    if ordering.m != problem.m:
        raise ConfigurationError(
            f"ordering is built for m={ordering.m}, problem has m={problem.m}"
        )
    if variant in _GRADIENT_VARIANTS:
        if not is_whole_space(problem.constraint):
            raise ConfigurationError(f"{variant.value} requires an unconstrained problem")
        for comp in problem.components:
            if comp.prox_part is not ZERO_PROX:
                raise ConfigurationError(
                    f"{variant.value} needs differentiable components supplied as "
                    "subgradient parts with zero prox parts"
                )
    if variant is Variant.MOMENTUM and not (0.0 <= momentum_beta < 1.0):
        raise ConfigurationError("momentum beta must lie in [0, 1)")
    if variant is Variant.AGGREGATED and ordering.kind != "cyclic":
        raise ConfigurationError("the aggregated variant assumes cyclic ordering")


def run(
    problem: Problem,
    variant: Variant,
    ordering: OrderingPolicy,
    schedule: StepsizeSchedule,
    limits: RunLimits,
    x0=None,
    eval_stride: Optional[int] = None,
    momentum_beta: float = 0.0,
    record_points: bool = False,
    timing: bool = False,
) -> Trace:
    """Execute the chosen variant until a limit triggers.

    The objective is evaluated every ``eval_stride`` iterations (default:
    once per cycle) because a full evaluation costs one oracle call per
    component; the running best uses evaluated points only.  A final
    evaluation row is always recorded.  Identical arguments and seeds
    reproduce the trace exactly; wall-clock columns are only filled when
    ``timing`` is requested so default traces are byte-stable.

    A convergence failure inside a prox subproblem stops the run early and
    flags the partial trace via ``Trace.aborted``.
    """
    variant = Variant(variant)
    _validate(problem, variant, ordering, momentum_beta)
    m = problem.m
    policy = ordering.clone()
    locked = schedule.locked_for(policy.kind)
    stream = StepsizeStream(schedule, locked)
    stride = m if eval_stride is None else int(eval_stride)
    if stride < 1:
        raise ConfigurationError("eval_stride must be positive")
    cap = limits.iteration_cap(m)
    target = limits.target_value

    x = np.zeros(problem.dim) if x0 is None else as_point(x0)
    if x.shape != (problem.dim,):
        raise ConfigurationError("x0 dimension does not match the problem")
    x = problem.constraint.project(x)

    state = RunState(x=x, policy=policy)
    log = OracleLog()
    comps = problem.components
    constraint = problem.constraint
    rows: list = []
    xs: Optional[list] = [] if record_points else None
    zs: Optional[list] = [] if record_points else None
    aborted: Optional[str] = None
    t0 = time.perf_counter()

    def evaluate(k: int, i: Optional[int], alpha: Optional[float]) -> None:
        value = evaluate_total(problem, state.x)
        dist = problem.distance_to_optimum(state.x)
        wall = (time.perf_counter() - t0) * 1e3 if timing else None
        rows.append((k, i, alpha, value, dist, wall))
        if value < state.best_value:
            state.best_value = value
            state.best_point = state.x.copy()

    k = 0
    while k < cap:
        i = policy.next_index(k)
        cycle_start = k % m == 0
        alpha = stream.next(k, cycle_start)
        if k % stride == 0:
            evaluate(k, i, alpha)
            if target is not None and state.best_value <= target + 1e-12:
                break
        comp = comps[i - 1]
        inv_alpha = 1.0 / alpha
        try:
            if variant is Variant.SUBGRAD:
                g = comp.subgrad_part.subgradient(state.x)
                log.record(math.sqrt(float(np.dot(g, g))))
                z = state.x
                x_next = constraint.project(state.x - alpha * g)
            elif variant is Variant.PROX:
                z = comp.prox_part.prox(state.x, alpha, constraint)
                log.record(float(np.linalg.norm(state.x - z)) * inv_alpha)
                x_next = z
            elif variant is Variant.PROX_SUBGRAD or variant is Variant.PROX_FREE_SUBGRAD:
                z, g, x_next = _step_prox_subgrad(
                    state.x, comp, constraint, alpha,
                    free_prox=variant is Variant.PROX_FREE_SUBGRAD,
                )
                log.record(float(np.linalg.norm(state.x - z)) * inv_alpha)
                log.record(math.sqrt(float(np.dot(g, g))))
            elif variant is Variant.SUBGRAD_PROX:
                z, g, x_next = _step_subgrad_prox(state.x, comp, constraint, alpha)
                log.record(math.sqrt(float(np.dot(g, g))))
                log.record(float(np.linalg.norm(z - x_next)) * inv_alpha)
            elif variant is Variant.MOMENTUM:
                g = comp.subgrad_part.subgradient(state.x)
                log.record(math.sqrt(float(np.dot(g, g))))
                prev = state.prev_x if state.prev_x is not None else state.x
                z = state.x
                x_next = state.x - alpha * g
                if momentum_beta != 0.0:
                    x_next = x_next + momentum_beta * (state.x - prev)
            else:  # AGGREGATED
                z = state.x
                x_next = step_aggregated(state, comp, alpha)
                log.record(math.sqrt(float(np.dot(state.history[-1], state.history[-1]))))
                if len(state.history) > m:
                    state.history.popleft()
        except ConvergenceError as exc:
            aborted = str(exc)
            break
        if record_points:
            xs.append(state.x)
            zs.append(z)
        state.prev_x = state.x
        state.x = x_next
        k += 1
        state.k = k

    if not rows or rows[-1][0] != k:
        evaluate(k, None, None)

    metadata = {
        "variant": variant.value,
        "ordering": {"kind": policy.kind, "m": policy.m, "seed": policy.seed},
        "schedule": _schedule_meta(schedule, locked),
        "limits": {
            "max_iters": limits.max_iters,
            "max_cycles": limits.max_cycles,
            "target_value": limits.target_value,
        },
        "eval_stride": stride,
        "momentum_beta": momentum_beta,
        "x0": [float(v) for v in x],
        "dim": problem.dim,
    }
    return Trace(
        metadata=metadata,
        rows=rows,
        best_value=state.best_value,
        best_point=state.best_point,
        final_point=state.x,
        oracle_log=log,
        aborted=aborted,
        iterates=xs,
        prox_points=zs,
    )


def _schedule_meta(schedule: StepsizeSchedule, locked: bool) -> dict:
    meta: dict = {"kind": schedule.kind, "cycle_locked": locked}
    if schedule.kind == "constant":
        meta["alpha"] = schedule.alpha
    elif schedule.kind == "harmonic":
        meta["a"] = schedule.a
        meta["b"] = schedule.b
    else:
        meta["values"] = list(schedule.values)
    return meta
