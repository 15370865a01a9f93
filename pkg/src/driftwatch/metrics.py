"""Distances between one-dimensional empirical distributions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distribution import EmpiricalSample
from .errors import BadEdges, BadEps, EdgeMismatch, EmptySample

DEFAULT_BINS = 256
DEFAULT_PAD = 0.10
DEFAULT_KL_EPS = 1e-9


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    mass: np.ndarray
    clamped_fraction: float

    @property
    def bins(self) -> int:
        return int(self.mass.size)

    @property
    def max_width(self) -> float:
        return float(np.max(np.diff(self.edges)))


def _check_nonempty(*samples: EmpiricalSample) -> None:
    for s in samples:
        if s is None or s.count == 0:
            raise EmptySample("distance needs two non-empty samples")


def wasserstein_equal_count(a: EmpiricalSample, b: EmpiricalSample) -> float:
    """Mean absolute difference of order statistics; requires equal counts."""
    _check_nonempty(a, b)
    if a.count != b.count:
        raise ValueError("equal-count path needs samples of the same size")
    return float(np.mean(np.abs(a.values - b.values)))


def wasserstein_cdf(a: EmpiricalSample, b: EmpiricalSample) -> float:
    """Area between the two empirical CDFs over the merged support."""
    _check_nonempty(a, b)
    av, bv = a.values, b.values
    support = np.concatenate((av, bv))
    support.sort(kind="mergesort")
    widths = np.diff(support)
    left = support[:-1]
    fa = np.searchsorted(av, left, side="right") / av.size
    fb = np.searchsorted(bv, left, side="right") / bv.size
    return float(np.sum(np.abs(fa - fb) * widths))


def wasserstein(a: EmpiricalSample, b: EmpiricalSample) -> float:
    """Exact order-1 Wasserstein distance, in the units of the feature."""
    _check_nonempty(a, b)
    if a.count == b.count:
        return wasserstein_equal_count(a, b)
    return wasserstein_cdf(a, b)


def default_edges(reference: EmpiricalSample, bins: int = DEFAULT_BINS, pad: float = DEFAULT_PAD) -> np.ndarray:
    """Equal-width edges over the reference range widened by ``pad`` per side."""
    _check_nonempty(reference)
    lo, hi = float(reference.values[0]), float(reference.values[-1])
    span = hi - lo
    if span <= 0.0:
        # degenerate reference: unit-wide range centred on the value
        span = max(1.0, abs(lo) * 1e-6)
        lo, hi = lo - span / 2, hi + span / 2
        return np.linspace(lo, hi, bins + 1)
    return np.linspace(lo - pad * span, hi + pad * span, bins + 1)


def _check_edges(edges) -> np.ndarray:
    e = np.asarray(edges, dtype=np.float64)
    if e.ndim != 1 or e.size < 2 or not np.all(np.isfinite(e)) or not np.all(np.diff(e) > 0):
        raise BadEdges("edges must be finite, strictly increasing, length >= 2")
    return e


def histogram(s: EmpiricalSample, edges) -> Histogram:
    _check_nonempty(s)
    e = _check_edges(edges)
    x = s.values
    nbins = e.size - 1
    idx = np.searchsorted(e, x, side="right") - 1
    outside = (x < e[0]) | (x >= e[-1])
    idx = np.clip(idx, 0, nbins - 1)
    counts = np.bincount(idx, minlength=nbins).astype(np.float64)
    return Histogram(
        edges=e,
        mass=counts / x.size,
        clamped_fraction=float(np.count_nonzero(outside)) / x.size,
    )


def _check_shared(p: Histogram, q: Histogram) -> None:
    if p.edges.shape != q.edges.shape or not np.array_equal(p.edges, q.edges):
        raise EdgeMismatch("histograms must share identical edges")


def wasserstein_binned(p: Histogram, q: Histogram) -> float:
    """W1 between binned distributions with each bin's mass at its midpoint.

    Linear in the number of bins; error against the exact distance on the
    raw samples is at most the widest bin when nothing was clamped.
    """
    _check_shared(p, q)
    mids = 0.5 * (p.edges[:-1] + p.edges[1:])
    cdf_gap = np.cumsum(p.mass - q.mass)[:-1]
    return float(np.sum(np.abs(cdf_gap) * np.diff(mids)))


def kl_divergence(p: Histogram, q: Histogram, eps: float = DEFAULT_KL_EPS) -> float:
    """KL(p || q) in nats after adding ``eps`` to every bin and renormalizing."""
    _check_shared(p, q)
    if not (eps > 0 and np.isfinite(eps)):
        raise BadEps(f"eps must be a positive finite number, got {eps}")
    ps = p.mass + eps
    qs = q.mass + eps
    ps = ps / ps.sum()
    qs = qs / qs.sum()
    return max(0.0, float(np.sum(ps * np.log(ps / qs))))
