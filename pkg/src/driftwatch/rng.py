"""Counter-based SplitMix64 streams.

Output ``i`` of the stream seeded with ``s`` is ``mix(s + (i + 1) * GAMMA)``
(all arithmetic mod 2**64), which is exactly the sequence a sequential
SplitMix64 generator produces. Because any output can be computed from its
index alone, streams vectorize with numpy and child seeds are cheap: the
``k``-th child of a stream is simply its ``k``-th output.

Uniform doubles take the top 53 bits: ``(x >> 11) * 2**-53`` in [0, 1).
Normals use the cosine branch of Box-Muller on outputs ``2i`` and ``2i + 1``.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive(seed: int, *path: int) -> int:
    """Child seed reached by following ``path`` through nested streams."""
    s = seed & MASK64
    for p in path:
        s = mix64(s + ((p & MASK64) + 1) * GAMMA)
    return s


def fnv1a64(text: str) -> int:
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & MASK64
    return h


def raw(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Outputs ``offset .. offset + count - 1`` of the stream as uint64."""
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    z = idx * np.uint64(GAMMA) + np.uint64(seed & MASK64)
    z = (z ^ (z >> _U30)) * np.uint64(_M1)
    z = (z ^ (z >> _U27)) * np.uint64(_M2)
    return z ^ (z >> _U31)


def uniform(seed: int, count: int, offset: int = 0) -> np.ndarray:
    return (raw(seed, count, offset) >> _U11).astype(np.float64) * 2.0**-53


def normal(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Standard normals; draw ``i`` depends only on ``(seed, offset + i)``."""
    u = uniform(seed, 2 * count, 2 * offset)
    u1 = 1.0 - u[0::2]  # (0, 1], keeps log finite
    u2 = u[1::2]
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
