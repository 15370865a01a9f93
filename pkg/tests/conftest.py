import itertools

import numpy as np
import pytest

from driftwatch.baseline import build_baseline
from driftwatch.simgen import gen_stationary


def brute_force_w1(a, b):
    """Minimum mean |a_i - b_pi(i)| over all perfect matchings of equal-size samples."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    assert a.size == b.size
    perms = np.array(list(itertools.permutations(range(b.size))))
    return float(np.min(np.mean(np.abs(a[None, :] - b[perms]), axis=1)))


def grid_cdf_area(a, b, points=200_001):
    """Riemann-sum integral of |F_a - F_b| on a fine grid."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    lo = min(a[0], b[0]) - 1.0
    hi = max(a[-1], b[-1]) + 1.0
    t = np.linspace(lo, hi, points)
    fa = np.searchsorted(a, t, side="right") / a.size
    fb = np.searchsorted(b, t, side="right") / b.size
    return float(np.sum(np.abs(fa - fb)[:-1] * np.diff(t)))


@pytest.fixture(scope="session")
def gaussian_baseline():
    """10k training readings, Gaussian(100, var 10), seed 1."""
    return build_baseline(gen_stationary(100.0, 10.0, 10_000, seed=1))
