"""Seeded synthetic observation streams.

All randomness comes from :mod:`driftwatch.rng`. Each scenario draws from
fixed child streams of its seed, and draw ``i`` of a stream depends only on
``i``, so a stream prefix never changes when ``count`` grows and the first
``t_shift`` readings of a shift stream equal the stationary stream with the
same seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import rng
from .distribution import Observation
from .errors import BadParams

MS_PER_HOUR = 3_600_000
MS_PER_DAY = 86_400_000

# child-stream indices per scenario
_NOISE, _RATES, _EVENTS, _PICKS = 0, 1, 2, 3

DAY_START_MIN = 360.0
DAY_END_MIN = 1320.0
_HALF_SINE_MEAN = (DAY_END_MIN - DAY_START_MIN) / 1440.0 * 2.0 / math.pi


def day_shape(minute_of_day):
    """Daily activity curve: zero mean over the day, peak 1 at 14:00.

    A half-sine over [06:00, 22:00] and flat at night, shifted to zero mean
    and scaled so the peak is exactly 1 (night sits at about -0.74).
    """
    m = np.asarray(minute_of_day, dtype=np.float64)
    phase = (m - DAY_START_MIN) / (DAY_END_MIN - DAY_START_MIN)
    raw = np.where((phase >= 0) & (phase <= 1), np.sin(np.pi * np.clip(phase, 0, 1)), 0.0)
    return (raw - _HALF_SINE_MEAN) / (1.0 - _HALF_SINE_MEAN)


def _timestamps(count: int, interval_ms: int, start_ts: int) -> np.ndarray:
    if count < 1:
        raise BadParams("count must be >= 1")
    if interval_ms < 1:
        raise BadParams("emission interval must be >= 1 ms")
    if start_ts < 0:
        raise BadParams("start_ts must be >= 0")
    return start_ts + interval_ms * np.arange(count, dtype=np.int64)


def _observations(ts: np.ndarray, columns: dict[str, np.ndarray]) -> list[Observation]:
    names = list(columns)
    rows = zip(ts.tolist(), *(columns[n].tolist() for n in names))
    return [Observation(t, dict(zip(names, vals))) for t, *vals in rows]


def gen_stationary(mu: float = 100.0, sigma2: float = 10.0, count: int = 10_000, seed: int = 0, *,
                   feature: str = "order_total", interval_ms: int = 1000, start_ts: int = 0) -> list[Observation]:
    if not sigma2 > 0:
        raise BadParams("sigma2 must be > 0")
    ts = _timestamps(count, interval_ms, start_ts)
    x = mu + math.sqrt(sigma2) * rng.normal(rng.derive(seed, _NOISE), count)
    return _observations(ts, {feature: x})


def gen_shift(mu1: float = 100.0, mu2: float = 90.0, sigma2: float = 10.0, t_shift: int = 2000,
              count: int = 4000, seed: int = 0, *, feature: str = "order_total",
              interval_ms: int = 1000, start_ts: int = 0) -> list[Observation]:
    if not sigma2 > 0:
        raise BadParams("sigma2 must be > 0")
    if not 0 < t_shift < count:
        raise BadParams("need 0 < t_shift < count")
    ts = _timestamps(count, interval_ms, start_ts)
    z = rng.normal(rng.derive(seed, _NOISE), count)
    mu = np.where(np.arange(count) < t_shift, mu1, mu2)
    return _observations(ts, {feature: mu + math.sqrt(sigma2) * z})


def gen_seasonal(base: float = 1000.0, amplitude: float = 300.0, noise_sigma: float = 50.0, days: int = 1,
                 seed: int = 0, *, interval_ms: int = 5000, start_ts: int = 0,
                 feature: str = "tx_last_hour") -> list[Observation]:
    if days < 1 or amplitude < 0 or noise_sigma < 0:
        raise BadParams("need days >= 1, amplitude >= 0, noise_sigma >= 0")
    count = days * MS_PER_DAY // interval_ms
    ts = _timestamps(count, interval_ms, start_ts)
    minute = (ts % MS_PER_DAY) / 60_000.0
    x = base + amplitude * day_shape(minute) + noise_sigma * rng.normal(rng.derive(seed, _NOISE), count)
    return _observations(ts, {feature: x})


def _poisson(lam: np.ndarray, u: np.ndarray, kmax: int = 40) -> np.ndarray:
    """Inverse-CDF Poisson draws, one per uniform; ``lam`` broadcasts against ``u``."""
    pmf = np.exp(-lam) * np.ones_like(u)
    cdf = pmf.copy()
    k = np.zeros(u.shape, dtype=np.int64)
    for j in range(1, kmax + 1):
        above = u > cdf
        if not above.any():
            break
        k += above
        pmf = pmf * lam / j
        cdf = cdf + pmf
    return k


def gen_stale(window_hours: int = 168, freeze_at: int = 10_000, count: int = 30_000, seed: int = 0, *,
              interval_ms: int = 60_000, start_ts: int = 0, customers: int = 200,
              rate_range: tuple[float, float] = (0.02, 0.2), tracked_pages: float = 42.0) -> list[Observation]:
    """Page-visit counts over a trailing window, read from a table that freezes.

    Each request belongs to a random customer. ``visits_7d`` sums that
    customer's hourly visits over the last ``window_hours`` complete hours as
    recorded in the table; from the hour of observation ``freeze_at`` on, the
    table receives nothing. ``tracked_pages`` is read from the same table
    but does not slide a window, so it stays constant through the freeze.
    """
    if window_hours < 1 or customers < 1:
        raise BadParams("window_hours and customers must be >= 1")
    if not 0 <= freeze_at < count:
        raise BadParams("need 0 <= freeze_at < count")
    lo_rate, hi_rate = rate_range
    if not 0 < lo_rate <= hi_rate:
        raise BadParams("rate_range must be positive and ordered")
    ts = _timestamps(count, interval_ms, start_ts)
    hours = ts // MS_PER_HOUR
    h0 = int(hours[0]) - window_hours
    span = int(hours[-1]) - h0 + 1

    rates = lo_rate + (hi_rate - lo_rate) * rng.uniform(rng.derive(seed, _RATES), customers)
    u = rng.uniform(rng.derive(seed, _EVENTS), customers * span).reshape(customers, span)
    events = _poisson(rates[:, None], u)
    freeze_hour = int(hours[freeze_at])
    events[:, freeze_hour - h0:] = 0

    cum = np.zeros((customers, span + 1), dtype=np.int64)
    np.cumsum(events, axis=1, out=cum[:, 1:])
    who = np.minimum((rng.uniform(rng.derive(seed, _PICKS), count) * customers).astype(np.int64), customers - 1)
    hi = hours - h0            # exclusive: current hour not yet complete
    lo = hi - window_hours
    visits = cum[who, hi] - cum[who, lo]
    return _observations(ts, {
        "visits_7d": visits.astype(np.float64),
        "tracked_pages": np.full(count, float(tracked_pages)),
    })


@dataclass(frozen=True)
class GenSpec:
    scenario: str
    seed: int = 0
    params: dict[str, Any] = field(default_factory=dict)


_GENERATORS = {
    "stationary": gen_stationary,
    "shift": gen_shift,
    "seasonal": gen_seasonal,
    "stale": gen_stale,
}


def generate(spec: GenSpec) -> list[Observation]:
    try:
        fn = _GENERATORS[spec.scenario]
    except KeyError:
        raise BadParams(f"unknown scenario {spec.scenario!r}") from None
    try:
        return fn(seed=spec.seed, **spec.params)
    except TypeError as exc:
        raise BadParams(str(exc)) from exc
