"""Shared fixtures, catalogs of bundled oracles, and acceptance reporting."""

from __future__ import annotations

import numpy as np
import pytest

from incrprox import (
    Ball,
    Box,
    Halfspace,
    Hyperplane,
    Intersection,
    WHOLE_SPACE,
    abs_value_function,
    l1_prox_function,
    quadratic_residual_function,
    rank1_quadratic_prox_function,
    set_distance_prox_function,
    weber_distance_function,
    weighted_norm_prox_function,
)
from incrprox.core import SubgradientFunction

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(name: str, ok: bool) -> None:
    line = f"{name}: {'PASS' if ok else 'FAIL'}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def provided_sets() -> list:
    """The concrete 2-D constraint sets the package ships."""
    return [
        WHOLE_SPACE,
        Box([-1.0, -2.0], [2.0, 1.0]),
        Ball([0.5, -0.5], 1.5),
        Halfspace([1.0, 2.0], 1.0),
        Hyperplane([1.0, -1.0], 0.5),
        Intersection(
            [Halfspace([1.0, 0.0], 0.5), Halfspace([0.0, 1.0], 0.8), Ball([0.0, 0.0], 2.0)]
        ),
    ]


def provided_subgradient_functions() -> list[tuple[SubgradientFunction, int]]:
    """Bundled subgradient oracles with their expected dimension."""
    l1 = l1_prox_function(0.7)
    dist = set_distance_prox_function(Halfspace([1.0, 1.0], 0.3), 1.3)
    entries = [
        (abs_value_function(0.7), 1),
        (quadratic_residual_function([1.0, -2.0], 0.4), 2),
        (weber_distance_function([0.3, -0.1], 1.7), 2),
        (SubgradientFunction(l1.value, l1.subgradient, l1.label), 2),
        (SubgradientFunction(dist.value, dist.subgradient, dist.label), 2),
    ]
    return entries


def provided_prox_operators() -> list[tuple]:
    """(name, ProxCapableFunction, dim) triples for the closed-form proxes."""
    return [
        ("l1", l1_prox_function(0.8), 3),
        ("rank1", rank1_quadratic_prox_function([1.0, -0.5, 0.25], 0.3), 3),
        ("weighted_norm", weighted_norm_prox_function([0.5, -1.0], 1.2), 2),
        ("set_distance", set_distance_prox_function(Halfspace([1.0, 2.0], 0.5), 0.9), 2),
    ]
