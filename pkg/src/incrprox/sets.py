"""Constraint sets with projection, distance, and membership oracles."""

from __future__ import annotations

import abc
import math
from typing import Sequence

import numpy as np

from .core import ConfigurationError, DEFAULT_TOLERANCES, Point, as_point


class ConstraintSet(abc.ABC):
    """A closed convex set queried through projection.

    ``distance`` and ``contains`` are derived from ``project`` so the three
    oracles stay mutually consistent.  Projections return the input array
    unchanged when the point is already a member, which keeps repeated
    projection bit-stable.
    """

    description: str = "set"

    @abc.abstractmethod
    def project(self, x: Point) -> Point:
        """Closest point of the set to ``x``."""

    def distance(self, x: Point) -> float:
        return float(np.linalg.norm(x - self.project(x)))

    def contains(self, x: Point, tol: float = DEFAULT_TOLERANCES.projection) -> bool:
        return self.distance(x) <= tol


class WholeSpace(ConstraintSet):
    """No constraint; projection is the identity."""

    description = "whole-space"

    def project(self, x: Point) -> Point:
        return x

    def distance(self, x: Point) -> float:
        return 0.0

    def contains(self, x: Point, tol: float = DEFAULT_TOLERANCES.projection) -> bool:
        return True


WHOLE_SPACE = WholeSpace()


def is_whole_space(s: "ConstraintSet | None") -> bool:
    return s is None or isinstance(s, WholeSpace)


class Box(ConstraintSet):
    """Axis-aligned box ``lower <= x <= upper`` (coordinatewise)."""

    def __init__(self, lower, upper):
        self.lower = as_point(lower)
        self.upper = as_point(upper)
        if self.lower.shape != self.upper.shape:
            raise ConfigurationError("box bounds must share a dimension")
        if np.any(self.lower > self.upper):
            raise ConfigurationError("box lower bound exceeds upper bound")
        self.description = "box"

    def project(self, x: Point) -> Point:
        if np.all(x >= self.lower) and np.all(x <= self.upper):
            return x
        return np.clip(x, self.lower, self.upper)


class Ball(ConstraintSet):
    """Euclidean ball of radius ``radius`` around ``center``."""

    def __init__(self, center, radius: float):
        self.center = as_point(center)
        if radius <= 0:
            raise ConfigurationError("ball radius must be positive")
        self.radius = float(radius)
        self.description = "ball"

    def project(self, x: Point) -> Point:
        gap = x - self.center
        norm = float(np.linalg.norm(gap))
        if norm <= self.radius:
            return x
        return self.center + (self.radius / norm) * gap


class Halfspace(ConstraintSet):
    """Halfspace ``a'x <= b`` with nonzero normal ``a``."""

    def __init__(self, a, b: float):
        self.a = as_point(a)
        self.norm_sq = float(np.dot(self.a, self.a))
        if self.norm_sq == 0.0:
            raise ConfigurationError("halfspace normal must be nonzero")
        self.b = float(b)
        self.description = "halfspace"

    def project(self, x: Point) -> Point:
        slack = float(np.dot(self.a, x)) - self.b
        if slack <= 0.0:
            return x
        return x - (slack / self.norm_sq) * self.a

    def distance(self, x: Point) -> float:
        slack = float(np.dot(self.a, x)) - self.b
        if slack <= 0.0:
            return 0.0
        return slack / math.sqrt(self.norm_sq)


class Hyperplane(ConstraintSet):
    """Affine hyperplane ``a'x = b`` with nonzero normal ``a``."""

    def __init__(self, a, b: float):
        self.a = as_point(a)
        self.norm_sq = float(np.dot(self.a, self.a))
        if self.norm_sq == 0.0:
            raise ConfigurationError("hyperplane normal must be nonzero")
        self.b = float(b)
        self.description = "hyperplane"

    def project(self, x: Point) -> Point:
        slack = float(np.dot(self.a, x)) - self.b
        if slack == 0.0:
            return x
        return x - (slack / self.norm_sq) * self.a


class Intersection(ConstraintSet):
    """Intersection of convex sets, projected by cyclic sweeps.

    The projection is exact for a single member and approximate otherwise:
    sweeps stop once the iterate is within ``exit_tol`` of every member and
    has essentially stopped moving, or after ``max_sweeps`` full passes.
    For non-affine members the fixed point is a feasibility point, not the
    true nearest point, so treat this set as a diagnostic tool.
    """

    def __init__(self, sets: Sequence[ConstraintSet], max_sweeps: int = 10_000,
                 exit_tol: float = 1e-10):
        if not sets:
            raise ConfigurationError("intersection needs at least one member set")
        self.sets = tuple(sets)
        self.max_sweeps = int(max_sweeps)
        self.exit_tol = float(exit_tol)
        self.description = "intersection(" + ",".join(s.description for s in self.sets) + ")"

    def project(self, x: Point) -> Point:
        if len(self.sets) == 1:
            return self.sets[0].project(x)
        if max(s.distance(x) for s in self.sets) <= 1e-14:
            return x
        # The move threshold is far below exit_tol so that inputs near each
        # other settle on numerically identical fixed points (keeps the
        # realized map nonexpansive in floating point).
        move_tol = self.exit_tol * 1e-3
        y = x
        for _ in range(self.max_sweeps):
            start = y
            for s in self.sets:
                y = s.project(y)
            moved = float(np.linalg.norm(y - start))
            if moved <= move_tol and max(s.distance(y) for s in self.sets) <= self.exit_tol:
                return y
        return y
