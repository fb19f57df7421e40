"""Stepsize schedules and component-ordering policies.

Randomized orderings draw from a small splitmix-style generator written
out here in full, so that a seed produces the same index stream on every
platform and interpreter.  Schedules are pure; the freeze-within-a-cycle
behavior lives in a per-run :class:`StepsizeStream` cursor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .core import ConfigurationError

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Tiny deterministic PRNG with a platform-independent stream."""

    def __init__(self, seed: int):
        self._state = int(seed) & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randint(self, n: int) -> int:
        """Uniform draw from ``0..n-1`` (modulo bias is below n / 2**64)."""
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(i + 1)
            items[i], items[j] = items[j], items[i]


@dataclass(frozen=True)
class StepsizeSchedule:
    """Rule producing the stepsize for iteration ``k``.

    Kinds
    -----
    ``constant``: always ``alpha``.
    ``harmonic``: ``a / (k + b)``; diverging sum, square-summable, so runs
    with it converge exactly rather than to a stepsize-sized neighborhood.
    ``table``: explicit values, clamped to the last entry past the end.

    ``cycle_locked=None`` defers to the ordering: cyclic and shuffled
    orderings freeze the value over each cycle (the convention the
    cyclic-order analysis assumes), uniform sampling does not.
    """

    kind: str
    alpha: float = 0.0
    a: float = 0.0
    b: float = 0.0
    values: tuple[float, ...] = ()
    cycle_locked: Optional[bool] = None

    @staticmethod
    def constant(alpha: float, cycle_locked: Optional[bool] = None) -> "StepsizeSchedule":
        if alpha <= 0:
            raise ConfigurationError("constant stepsize must be positive")
        return StepsizeSchedule(kind="constant", alpha=alpha, cycle_locked=cycle_locked)

    @staticmethod
    def harmonic(a: float, b: float, cycle_locked: Optional[bool] = None) -> "StepsizeSchedule":
        if a <= 0 or b <= 0:
            raise ConfigurationError("harmonic parameters must be positive")
        return StepsizeSchedule(kind="harmonic", a=a, b=b, cycle_locked=cycle_locked)

    @staticmethod
    def from_table(values: Sequence[float], cycle_locked: Optional[bool] = None) -> "StepsizeSchedule":
        vals = tuple(float(v) for v in values)
        if not vals or any(v <= 0 for v in vals):
            raise ConfigurationError("stepsize table must be nonempty and positive")
        return StepsizeSchedule(kind="table", values=vals, cycle_locked=cycle_locked)

    def raw(self, k: int) -> float:
        """Schedule value at iteration ``k``, ignoring cycle locking."""
        if k < 0:
            raise ConfigurationError("iteration index must be nonnegative")
        if self.kind == "constant":
            return self.alpha
        if self.kind == "harmonic":
            return self.a / (k + self.b)
        if self.kind == "table":
            return self.values[min(k, len(self.values) - 1)]
        raise ConfigurationError(f"unknown schedule kind {self.kind!r}")

    def locked_for(self, ordering_kind: str) -> bool:
        if self.cycle_locked is not None:
            return self.cycle_locked
        return ordering_kind in ("cyclic", "shuffle")


class StepsizeStream:
    """Cursor over a schedule that freezes values across a cycle.

    One stream per run; the underlying schedule stays immutable and
    shareable.
    """

    def __init__(self, schedule: StepsizeSchedule, locked: bool):
        self.schedule = schedule
        self.locked = locked
        self._frozen: Optional[float] = None

    def next(self, k: int, cycle_start: bool) -> float:
        if not self.locked:
            return self.schedule.raw(k)
        if cycle_start or self._frozen is None:
            self._frozen = self.schedule.raw(k)
        return self._frozen


def next_stepsize(stream: StepsizeStream, k: int, cycle_start: bool) -> float:
    """Stepsize for iteration ``k``; frozen at cycle starts when locked."""
    return stream.next(k, cycle_start)


class OrderingPolicy:
    """Produces the component index (1-based) used at each iteration.

    Holds the RNG state for randomized kinds, so use one instance per run
    and call :meth:`next_index` with consecutive ``k`` starting at 0.  The
    ``spec`` tuple rebuilds an identical policy for replay.
    """

    def __init__(self, kind: str, m: int, seed: int = 0):
        if kind not in ("cyclic", "shuffle", "uniform"):
            raise ConfigurationError(f"unknown ordering kind {kind!r}")
        if m < 1:
            raise ConfigurationError("component count m must be positive")
        self.kind = kind
        self.m = int(m)
        self.seed = int(seed)
        self._rng = SplitMix64(self.seed)
        self._perm: list[int] = []
        self._cycle = -1

    @staticmethod
    def cyclic(m: int) -> "OrderingPolicy":
        return OrderingPolicy("cyclic", m)

    @staticmethod
    def shuffle_per_cycle(m: int, seed: int) -> "OrderingPolicy":
        return OrderingPolicy("shuffle", m, seed)

    @staticmethod
    def uniform_random(m: int, seed: int) -> "OrderingPolicy":
        return OrderingPolicy("uniform", m, seed)

    @property
    def spec(self) -> tuple:
        return (self.kind, self.m, self.seed)

    def clone(self) -> "OrderingPolicy":
        return OrderingPolicy(*self.spec)

    def next_index(self, k: int) -> int:
        if k < 0:
            raise ConfigurationError("iteration index must be nonnegative")
        if self.kind == "cyclic":
            return (k % self.m) + 1
        if self.kind == "uniform":
            return self._rng.randint(self.m) + 1
        cycle = k // self.m
        if cycle != self._cycle:
            # Catch up in order so any skipped cycles still consume the
            # same RNG stream and the policy stays replayable.
            while self._cycle < cycle:
                self._perm = list(range(1, self.m + 1))
                self._rng.shuffle(self._perm)
                self._cycle += 1
        return self._perm[k % self.m]


def next_index(policy: OrderingPolicy, k: int) -> int:
    """Component index for iteration ``k`` under the policy."""
    return policy.next_index(k)
