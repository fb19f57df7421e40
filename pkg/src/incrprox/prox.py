r"""Proximal operators in closed form, plus a numeric fallback.

The proximal operator of a convex function ``f`` with stepsize ``alpha``
maps a center ``x`` to

    prox(x) = argmin_z  f(z) + ||z - x||^2 / (2 * alpha),

optionally restricting ``z`` to a constraint set.  The inner objective is
``1/alpha``-strongly convex, so the minimizer exists and is unique.

Closed forms are provided for the function classes the bundled
applications need: the l1 norm (coordinatewise soft thresholding), a
rank-one quadratic data-fit term, a weighted Euclidean distance to an
anchor, and a scaled distance-to-set function (projection followed by an
interpolation).  ``prox_numeric_fallback`` treats any convex function with
a subgradient oracle as prox capable, at the cost of an inner iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ConfigurationError,
    ConvergenceError,
    Point,
    ProxCapableFunction,
    SubgradientFunction,
    as_point,
)
from .sets import ConstraintSet, is_whole_space


@dataclass(frozen=True)
class ShrinkageParams:
    """Weight of an l1 regularizer handled by soft thresholding."""

    gamma: float
    per_coordinate: bool = True

    def __post_init__(self):
        if self.gamma <= 0:
            raise ConfigurationError("shrinkage weight gamma must be positive")


@dataclass(frozen=True)
class Rank1QuadraticParams:
    """Parameters of the data-fit term ``(c'x - d)^2 / 2``.

    A zero ``c`` is allowed and makes the function constant.
    """

    c: Point
    d: float

    def __post_init__(self):
        object.__setattr__(self, "c", as_point(self.c))
        object.__setattr__(self, "d", float(self.d))


def shrink(x: Point, gamma: float, alpha: float) -> Point:
    """Coordinatewise soft threshold: the prox of ``gamma * ||.||_1``.

    Each coordinate moves toward zero by ``gamma * alpha`` and is clipped
    at zero.  Coordinates exactly on the threshold map to zero (the two
    adjacent branches agree there), which keeps the operator bit-exactly
    reproducible.
    """
    if gamma <= 0:
        raise ConfigurationError("gamma must be positive")
    if alpha <= 0:
        raise ConfigurationError("alpha must be positive")
    threshold = gamma * alpha
    return np.sign(x) * np.maximum(np.abs(x) - threshold, 0.0)


def prox_rank1_quadratic(x: Point, params: Rank1QuadraticParams, alpha: float) -> Point:
    """Prox of ``(c'z - d)^2 / 2``: a damped residual correction.

    Stationarity of the inner objective gives the unique minimizer
    ``x - alpha * c * (c'x - d) / (1 + alpha * ||c||^2)`` directly.
    """
    if alpha <= 0:
        raise ConfigurationError("alpha must be positive")
    c = params.c
    residual = float(np.dot(c, x)) - params.d
    denom = 1.0 + alpha * float(np.dot(c, c))
    return x - (alpha * residual / denom) * c


def prox_weighted_norm(x: Point, center: Point, w: float, alpha: float) -> Point:
    """Block soft threshold: the prox of ``w * ||. - center||``.

    Collapses to ``center`` when the center is within ``alpha * w``;
    otherwise shrinks the gap radially by that amount.
    """
    if w <= 0 or alpha <= 0:
        raise ConfigurationError("w and alpha must be positive")
    gap = x - center
    norm = float(np.linalg.norm(gap))
    if norm <= alpha * w:
        return center.copy()
    return center + (1.0 - alpha * w / norm) * gap


def interpolated_projection(x: Point, constraint: ConstraintSet, gamma: float,
                            alpha: float) -> Point:
    """Prox of ``gamma * dist(.; constraint)``.

    For a point outside the set this is a convex combination of the point
    and its projection with weight ``beta = alpha * gamma / dist``, or the
    full projection once ``beta`` reaches 1.  Points already inside (or
    within 1e-14, to avoid dividing by a vanishing distance) are returned
    unchanged.
    """
    if gamma <= 0 or alpha <= 0:
        raise ConfigurationError("gamma and alpha must be positive")
    p = constraint.project(x)
    dist = float(np.linalg.norm(x - p))
    if dist <= 1e-14:
        return x
    beta = alpha * gamma / dist
    if beta >= 1.0:
        return p
    return (1.0 - beta) * x + beta * p


def prox_numeric_fallback(
    fn: SubgradientFunction,
    center: Point,
    alpha: float,
    constraint: ConstraintSet | None = None,
    tol: float = 1e-7,
    max_steps: int = 100_000,
) -> Point:
    """Prox of an arbitrary convex function via projected subgradient descent.

    Minimizes ``fn(z) + ||z - center||^2 / (2 * alpha)`` with inner steps
    ``z <- P(z - s_t * g(z))`` where ``g`` stacks the function subgradient
    with the proximity gradient and ``s_t = alpha / (1 + t)``.  The inner
    objective is ``1/alpha``-strongly convex, so the diminishing steps
    converge; iteration stops once the step displacement (the optimality
    residual at the current stepsize) drops to ``tol``.

    Raises
    ------
    ConvergenceError
        If the displacement never reaches ``tol`` within ``max_steps``;
        the exception carries the final residual.
    """
    if alpha <= 0:
        raise ConfigurationError("alpha must be positive")
    free = is_whole_space(constraint)
    z = center if free else constraint.project(center)
    inv_alpha = 1.0 / alpha
    residual = math.inf
    for t in range(max_steps):
        g = fn.subgradient(z) + inv_alpha * (z - center)
        step = alpha / (1.0 + t)
        candidate = z - step * g
        if not free:
            candidate = constraint.project(candidate)
        residual = float(np.linalg.norm(candidate - z))
        z = candidate
        if residual <= tol:
            return z
    raise ConvergenceError(
        f"prox fallback exhausted {max_steps} steps (residual {residual:.3e} > tol {tol:.3e})",
        residual=residual,
    )


def make_prox_capable(
    value,
    free_prox,
    subgradient,
    label: str = "",
    fallback_tol: float = 1e-7,
) -> ProxCapableFunction:
    """Wrap a closed-form whole-space prox into a set-aware prox oracle.

    The closed form answers whole-space queries; queries against a
    nontrivial constraint set are routed through the numeric fallback using
    the supplied subgradient selection.
    """

    def prox(center: Point, alpha: float, constraint: ConstraintSet | None = None) -> Point:
        if is_whole_space(constraint):
            return free_prox(center, alpha)
        return prox_numeric_fallback(
            SubgradientFunction(value=value, subgradient=subgradient, label=label),
            center,
            alpha,
            constraint,
            tol=fallback_tol,
        )

    return ProxCapableFunction(value=value, prox=prox, subgradient=subgradient, label=label)


def l1_prox_function(gamma: float) -> ProxCapableFunction:
    """``gamma * ||.||_1`` with soft thresholding as its prox."""
    params = ShrinkageParams(gamma)

    def value(x: Point) -> float:
        return params.gamma * float(np.sum(np.abs(x)))

    def subgradient(x: Point) -> Point:
        return params.gamma * np.sign(x)

    return make_prox_capable(
        value,
        lambda center, alpha: shrink(center, params.gamma, alpha),
        subgradient,
        label=f"l1(gamma={gamma})",
    )


def rank1_quadratic_prox_function(c, d: float) -> ProxCapableFunction:
    """``(c'x - d)^2 / 2`` with its damped-residual closed-form prox."""
    params = Rank1QuadraticParams(as_point(c), float(d))

    def value(x: Point) -> float:
        r = float(np.dot(params.c, x)) - params.d
        return 0.5 * r * r

    def subgradient(x: Point) -> Point:
        return params.c * (float(np.dot(params.c, x)) - params.d)

    return make_prox_capable(
        value,
        lambda center, alpha: prox_rank1_quadratic(center, params, alpha),
        subgradient,
        label="rank1-quadratic",
    )


def weighted_norm_prox_function(center, w: float) -> ProxCapableFunction:
    """``w * ||x - center||`` with the block soft threshold as its prox.

    The subgradient selection at the anchor itself is the zero vector.
    """
    anchor = as_point(center)
    if w <= 0:
        raise ConfigurationError("weight must be positive")

    def value(x: Point) -> float:
        return w * float(np.linalg.norm(x - anchor))

    def subgradient(x: Point) -> Point:
        gap = x - anchor
        norm = float(np.linalg.norm(gap))
        if norm == 0.0:
            return np.zeros_like(x)
        return (w / norm) * gap

    return make_prox_capable(
        value,
        lambda c, alpha: prox_weighted_norm(c, anchor, w, alpha),
        subgradient,
        label=f"weighted-norm(w={w})",
    )


def set_distance_prox_function(constraint: ConstraintSet, gamma: float) -> ProxCapableFunction:
    """``gamma * dist(x; constraint)`` with interpolated projection as prox.

    The subgradient selection on the boundary (distance zero) is the zero
    vector.
    """
    if gamma <= 0:
        raise ConfigurationError("gamma must be positive")

    def value(x: Point) -> float:
        return gamma * constraint.distance(x)

    def subgradient(x: Point) -> Point:
        p = constraint.project(x)
        gap = x - p
        dist = float(np.linalg.norm(gap))
        if dist <= 1e-14:
            return np.zeros_like(x)
        return (gamma / dist) * gap

    return make_prox_capable(
        value,
        lambda center, alpha: interpolated_projection(center, constraint, gamma, alpha),
        subgradient,
        label=f"dist({constraint.description})*{gamma}",
    )
