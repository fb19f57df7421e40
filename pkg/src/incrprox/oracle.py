"""Brute-force reference solvers.

These exist to validate the fast paths and to generate expected values for
tests; they are deliberately not re-exported from the package root and
should not appear on hot paths.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Sequence

import numpy as np

from .core import OracleError, Point, as_point

_MAX_GRID_POINTS = 5_000_000
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def grid_minimize(
    objective: Callable[[Point], float],
    lower: Sequence[float],
    upper: Sequence[float],
    resolution: float,
    refine: bool = False,
) -> tuple[Point, float]:
    """Exhaustive grid minimum of ``objective`` over a box (dim <= 3).

    With ``refine=False`` a single grid at spacing ``resolution`` is swept;
    the value error is at most ``L * resolution * sqrt(dim)`` for an
    ``L``-Lipschitz objective.  With ``refine=True`` coarse grids are swept
    and zoomed until the spacing drops below ``resolution``, which reaches
    fine resolutions cheaply but assumes the minimizer is unique enough
    (convex objectives with a sharp or strongly convex minimum) for the
    zoom window to keep containing it.
    """
    lo = as_point(lower)
    hi = as_point(upper)
    dim = lo.size
    if dim > 3:
        raise OracleError("grid search supports at most 3 dimensions")
    if np.any(hi <= lo):
        raise OracleError("grid box must have positive extent")
    if resolution <= 0:
        raise OracleError("resolution must be positive")

    if not refine:
        return _sweep(objective, lo, hi, resolution)

    best_x, best_v = None, math.inf
    span = float(np.max(hi - lo))
    step = span / 40.0
    while True:
        step = max(step, resolution)
        x, v = _sweep(objective, lo, hi, step)
        if v < best_v:
            best_x, best_v = x, v
        if step <= resolution:
            return best_x, best_v
        # Zoom to a window of a few cells around the incumbent.
        margin = 4.0 * step
        lo = np.maximum(lo, x - margin)
        hi = np.minimum(hi, x + margin)
        step /= 10.0


def _sweep(objective, lo: Point, hi: Point, step: float) -> tuple[Point, float]:
    axes = []
    total = 1
    for j in range(lo.size):
        n = int(math.floor((hi[j] - lo[j]) / step)) + 1
        axis = lo[j] + step * np.arange(n)
        if axis[-1] < hi[j] - 1e-12 * max(1.0, abs(hi[j])):
            axis = np.append(axis, hi[j])
        axes.append(axis)
        total *= axis.size
    if total > _MAX_GRID_POINTS:
        raise OracleError(f"grid of {total} points exceeds the safety cap")
    best_x, best_v = None, math.inf
    for combo in itertools.product(*axes):
        x = np.array(combo)
        v = objective(x)
        if v < best_v:
            best_x, best_v = x, v
    return best_x, best_v


def numeric_prox_1d(
    f: Callable[[float], float],
    center: float,
    alpha: float,
    tol: float,
    slope_bound: float = 1.0,
) -> float:
    """Golden-section prox of a scalar convex function.

    Minimizes ``f(t) + (t - center)^2 / (2 * alpha)`` over the bracket
    ``center +/- 10 * alpha * slope_bound``; the prox point moves at most
    ``alpha * slope_bound`` from the center, so the bracket contains it
    whenever ``slope_bound`` really bounds the slope of ``f`` there.

    Like any method driven by value comparisons, localization of a smooth
    minimum bottoms out near ``sqrt(machine eps)``; ``tol`` below roughly
    1e-8 is honored only at kinks, where values separate linearly.
    """
    if alpha <= 0 or tol <= 0 or slope_bound <= 0:
        raise OracleError("alpha, tol, and slope_bound must be positive")

    def phi(t: float) -> float:
        return f(t) + (t - center) ** 2 / (2.0 * alpha)

    lo = center - 10.0 * alpha * slope_bound
    hi = center + 10.0 * alpha * slope_bound
    mid = 0.5 * (lo + hi)
    if phi(lo) < phi(mid) or phi(hi) < phi(mid):
        raise OracleError("bracket does not enclose the prox point; raise slope_bound")

    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = phi(c), phi(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = phi(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = phi(d)
    return 0.5 * (a + b)


def halfspace_projection(a, b: float, x) -> Point:
    """Textbook projection onto ``a'x <= b``, written independently."""
    a = as_point(a)
    x = as_point(x)
    slack = float(a @ x) - float(b)
    if slack <= 0:
        return x.copy()
    return x - slack * a / float(a @ a)


def ball_projection(center, radius: float, x) -> Point:
    """Textbook projection onto a Euclidean ball."""
    center = as_point(center)
    x = as_point(x)
    gap = x - center
    norm = float(np.linalg.norm(gap))
    if norm <= radius:
        return x.copy()
    return center + gap * (radius / norm)


def box_projection(lower, upper, x) -> Point:
    """Textbook coordinatewise clamp onto a box."""
    return np.minimum(np.maximum(as_point(x), as_point(lower)), as_point(upper))
