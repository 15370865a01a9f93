"""Empirical samples and count-based sliding windows."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import rng
from .errors import EmptyInput, EmptyWindow, InvalidK, NonFiniteInput


@dataclass(frozen=True)
class Observation:
    """One live request: event time in unix ms and its feature readings."""

    ts: int
    values: Mapping[str, float]

    def __post_init__(self):
        if isinstance(self.ts, bool) or not isinstance(self.ts, int) or self.ts < 0:
            raise ValueError(f"ts must be a non-negative integer, got {self.ts!r}")
        if not self.values:
            raise ValueError("observation carries no feature readings")


class EmpiricalSample:
    """Sorted, finite, non-empty sample backed by a read-only float64 array."""

    __slots__ = ("_values",)

    def __init__(self, sorted_values: np.ndarray):
        # trusted constructor: callers guarantee sorted, finite, non-empty
        arr = np.asarray(sorted_values, dtype=np.float64)
        arr.flags.writeable = False
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def count(self) -> int:
        return int(self._values.size)

    def __len__(self) -> int:
        return self.count

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmpiricalSample):
            return NotImplemented
        return self._values.tobytes() == other._values.tobytes()

    def __hash__(self):
        return hash(self._values.tobytes())

    def __repr__(self) -> str:
        return f"EmpiricalSample(count={self.count})"


def sample_from_values(xs: Iterable[float]) -> EmpiricalSample:
    arr = np.array(xs if isinstance(xs, np.ndarray) else list(xs), dtype=np.float64)
    if arr.size == 0:
        raise EmptyInput("cannot build a sample from no values")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput("sample values must be finite")
    return EmpiricalSample(np.sort(arr, kind="stable"))


def subsample(s: EmpiricalSample, k: int, seed: int) -> EmpiricalSample:
    """Deterministic uniform subsample of ``k`` values.

    Every element gets a SplitMix64 key from ``seed``; the ``k`` smallest keys
    win. The result depends only on ``(s, k, seed)``.
    """
    if k < 1:
        raise InvalidK(f"k must be >= 1, got {k}")
    if s.count <= k:
        return s
    keys = rng.raw(seed, s.count)
    chosen = np.argsort(keys, kind="stable")[:k]
    return EmpiricalSample(np.sort(s.values[chosen]))


@dataclass
class SlidingWindow:
    """Ring buffer holding the last ``capacity`` finite readings.

    Each reading may carry its event time; the timestamps are used only to
    locate the window in the day for seasonal baselines.
    """

    capacity: int
    total_accepted: int = 0
    dropped_nonfinite: int = 0
    _buf: np.ndarray = field(init=False, repr=False)
    _ts: np.ndarray = field(init=False, repr=False)
    _head: int = field(default=0, init=False, repr=False)
    _size: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError(f"window capacity must be >= 1, got {self.capacity}")
        self._buf = np.empty(self.capacity, dtype=np.float64)
        self._ts = np.full(self.capacity, -1, dtype=np.int64)

    def __len__(self) -> int:
        return self._size

    @property
    def partial(self) -> bool:
        return self._size < self.capacity

    def push(self, x: float, ts: int = -1) -> None:
        try:
            x = float(x)
        except (TypeError, ValueError):
            self.dropped_nonfinite += 1
            return
        if not math.isfinite(x):
            self.dropped_nonfinite += 1
            return
        self._buf[self._head] = x
        self._ts[self._head] = ts
        self._head = (self._head + 1) % self.capacity
        if self._size < self.capacity:
            self._size += 1
        self.total_accepted += 1

    def contents(self) -> np.ndarray:
        """Buffered readings in arrival order (oldest first), as a copy."""
        if self._size < self.capacity:
            return self._buf[: self._size].copy()
        return np.concatenate((self._buf[self._head :], self._buf[: self._head]))

    def time_span(self) -> tuple[int, int] | None:
        """(oldest, newest) event times, or None when empty or untimed."""
        if self._size == 0:
            return None
        newest = self._ts[(self._head - 1) % self.capacity]
        oldest = self._ts[0] if self._size < self.capacity else self._ts[self._head]
        if oldest < 0 or newest < 0:
            return None
        return int(oldest), int(newest)

    def snapshot(self) -> tuple[EmpiricalSample, bool]:
        if self._size == 0:
            raise EmptyWindow("window holds no readings")
        return EmpiricalSample(np.sort(self._buf[: self._size])), self.partial


def window_push(w: SlidingWindow, x: float, ts: int = -1) -> SlidingWindow:
    w.push(x, ts)
    return w


def window_snapshot(w: SlidingWindow) -> tuple[EmpiricalSample, bool]:
    return w.snapshot()
