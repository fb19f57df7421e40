"""Bundled application problems: l1 least squares, facility location, and a
one-dimensional absolute-value family with a known optimum."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .core import (
    ZERO_PROX,
    ComponentPair,
    ConfigurationError,
    Point,
    Problem,
    SubgradientFunction,
    as_point,
)
from .prox import l1_prox_function, shrink, weighted_norm_prox_function
from .sets import WHOLE_SPACE, Box, ConstraintSet


class LassoSplit(str, Enum):
    # The regularizer is either spread over every component (scaled by 1/m,
    # so the solved objective keeps a single gamma * ||x||_1 term) or
    # attached whole to the first component.
    PER_COMPONENT_SCALED = "per_component_scaled"
    SINGLE_PROX_COPY = "single_prox_copy"


@dataclass(frozen=True)
class LassoInstance:
    """Data rows ``(c_i, d_i)`` and an l1 weight ``gamma >= 0``."""

    rows: tuple[tuple[Point, float], ...]
    gamma: float
    split_mode: LassoSplit = LassoSplit.PER_COMPONENT_SCALED

    def __post_init__(self):
        rows = tuple((as_point(c), float(d)) for c, d in self.rows)
        if not rows:
            raise ConfigurationError("a lasso instance needs at least one row")
        dim = rows[0][0].size
        if any(c.size != dim for c, _ in rows):
            raise ConfigurationError("all rows must share a dimension")
        if self.gamma < 0:
            raise ConfigurationError("gamma must be nonnegative")
        object.__setattr__(self, "rows", rows)

    @property
    def dim(self) -> int:
        return self.rows[0][0].size

    @property
    def m(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class WeberInstance:
    """Anchor points with positive weights."""

    anchors: tuple[tuple[Point, float], ...]

    def __post_init__(self):
        anchors = tuple((as_point(y), float(w)) for y, w in self.anchors)
        if not anchors:
            raise ConfigurationError("a Weber instance needs at least one anchor")
        if any(w <= 0 for _, w in anchors):
            raise ConfigurationError("anchor weights must be positive")
        dim = anchors[0][0].size
        if any(y.size != dim for y, _ in anchors):
            raise ConfigurationError("all anchors must share a dimension")
        object.__setattr__(self, "anchors", anchors)

    @property
    def dim(self) -> int:
        return self.anchors[0][0].size


def quadratic_residual_function(c, d: float) -> SubgradientFunction:
    """Smooth data-fit term ``(c'x - d)^2 / 2`` with its gradient."""
    cv = as_point(c)
    dv = float(d)

    def value(x: Point) -> float:
        r = float(np.dot(cv, x)) - dv
        return 0.5 * r * r

    def subgradient(x: Point) -> Point:
        return cv * (float(np.dot(cv, x)) - dv)

    return SubgradientFunction(value=value, subgradient=subgradient, label="quad-residual")


def abs_value_function(b: float) -> SubgradientFunction:
    """Scalar kink ``|x - b|`` on 1-D points; slope 0 exactly at the kink."""
    bv = float(b)

    def value(x: Point) -> float:
        return abs(float(x[0]) - bv)

    def subgradient(x: Point) -> Point:
        gap = float(x[0]) - bv
        if gap > 0.0:
            return np.array([1.0])
        if gap < 0.0:
            return np.array([-1.0])
        return np.array([0.0])

    return SubgradientFunction(value=value, subgradient=subgradient, label=f"abs(x-{b})")


def weber_distance_function(anchor, w: float) -> SubgradientFunction:
    """Weighted distance ``w * ||x - y||``; zero vector at the anchor."""
    y = as_point(anchor)
    wv = float(w)

    def value(x: Point) -> float:
        return wv * float(np.linalg.norm(x - y))

    def subgradient(x: Point) -> Point:
        gap = x - y
        norm = float(np.linalg.norm(gap))
        if norm == 0.0:
            return np.zeros_like(x)
        return (wv / norm) * gap

    return SubgradientFunction(value=value, subgradient=subgradient, label="weber-dist")


def lasso_problem(inst: LassoInstance) -> Problem:
    """l1-regularized least squares as component pairs.

    Each component couples a share of the regularizer (prox part, handled
    by soft thresholding) with one quadratic data term (subgradient part,
    handled by a gradient step).  Under the scaled split the total equals
    ``gamma * ||x||_1 + sum (c_i'x - d_i)^2 / 2`` exactly.
    """
    m = inst.m
    components = []
    for i, (c, d) in enumerate(inst.rows):
        if inst.gamma == 0:
            prox_part = ZERO_PROX
        elif inst.split_mode is LassoSplit.PER_COMPONENT_SCALED:
            prox_part = l1_prox_function(inst.gamma / m)
        else:
            prox_part = l1_prox_function(inst.gamma) if i == 0 else ZERO_PROX
        components.append(
            ComponentPair(
                prox_part=prox_part,
                subgrad_part=quadratic_residual_function(c, d),
                label=f"row{i}",
            )
        )
    return Problem(components=tuple(components), constraint=WHOLE_SPACE, dim=inst.dim)


def lasso_step(x_k: Point, row: tuple[Point, float], gamma_share: float,
               alpha: float) -> Point:
    """Soft threshold, then one gradient step on the row's quadratic term.

    ``gamma_share = 0`` skips the threshold and leaves a plain least-mean-
    squares update.
    """
    c, d = row
    z = shrink(x_k, gamma_share, alpha) if gamma_share > 0 else x_k
    return z - alpha * (c * (float(np.dot(c, z)) - float(d)))


def weber_problem(inst: WeberInstance, prox_mode: bool = True) -> Problem:
    """Sum of weighted distances to anchors, over the whole space.

    ``prox_mode`` routes each term through its closed-form prox (block
    soft threshold); otherwise terms are handled by subgradient steps.
    """
    components = []
    for i, (y, w) in enumerate(inst.anchors):
        if prox_mode:
            comp = ComponentPair(prox_part=weighted_norm_prox_function(y, w),
                                 label=f"anchor{i}")
        else:
            comp = ComponentPair(subgrad_part=weber_distance_function(y, w),
                                 label=f"anchor{i}")
        components.append(comp)
    return Problem(components=tuple(components), constraint=WHOLE_SPACE, dim=inst.dim)


def onedim_abs_benchmark(b: Sequence[float],
                         box: Optional[tuple[float, float]] = None) -> Problem:
    """``F(x) = sum |x - b_i|`` in 1-D, with the optimum known by sorting.

    Every component has unit subgradient bound, which pins the trajectory
    constant at 1 and makes this the canonical family for checking the gap
    ceilings.  The minimizing set is the median interval of ``b`` (clipped
    to the box when one is given) and the optimal value is evaluated there.
    """
    bs = [float(v) for v in b]
    if not bs:
        raise ConfigurationError("need at least one kink location")
    srt = sorted(bs)
    m = len(srt)
    lo, hi = srt[(m - 1) // 2], srt[m // 2]
    constraint: ConstraintSet = WHOLE_SPACE
    if box is not None:
        blo, bhi = float(box[0]), float(box[1])
        constraint = Box([blo], [bhi])
        lo, hi = min(max(lo, blo), bhi), min(max(hi, blo), bhi)
    fstar = sum(abs(lo - v) for v in bs)
    return Problem(
        components=tuple(
            ComponentPair(subgrad_part=abs_value_function(v), label=f"abs{j}")
            for j, v in enumerate(bs)
        ),
        constraint=constraint,
        dim=1,
        optimal_value=fstar,
        optimal_set=Box([lo], [hi]),
    )


def generate_lasso(seed: int, m: int, n: int, gamma: float,
                   split_mode: LassoSplit = LassoSplit.PER_COMPONENT_SCALED) -> LassoInstance:
    """Reproducible random instance: standard normal rows and targets."""
    rng = np.random.default_rng(seed)
    rows = tuple(
        (rng.standard_normal(n), float(rng.standard_normal())) for _ in range(m)
    )
    return LassoInstance(rows=rows, gamma=gamma, split_mode=split_mode)
