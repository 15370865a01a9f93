"""Fixed-seed reproductions of the window-size and seasonality experiments."""

from __future__ import annotations

import csv
import time
from typing import IO, Iterable, Sequence

from .baseline import BuildConfig, build_baseline
from .monitor import MonitorConfig, MonitorEngine
from .simgen import MS_PER_DAY, gen_seasonal, gen_shift, gen_stationary

FEATURE = "order_total"
SEASONAL_FEATURE = "tx_last_hour"

FIG4_TRAIN_SEED = 1
FIG4_LIVE_SEED = 2
FIG4_WINDOWS = (10, 100, 1000)
FIG4_EVERY = 50
FIG4_COUNT = 4000
FIG4_SHIFT_AT = 2000

FIG5_TRAIN_SEED = 3
FIG5_LIVE_SEED = 4
FIG5_TRAIN_DAYS = 30
FIG5_WINDOW = 1000
FIG5_EVERY = 100

FIG4_COLUMNS = ("scenario", "n", "t", "eval_ts", "score", "window_fill", "partial")
FIG5_COLUMNS = ("baseline", "eval_ts", "minute_of_day", "score", "baseline_kind")


def window_experiment(scenario: str, windows: Sequence[int] = FIG4_WINDOWS, *,
                      train_seed: int = FIG4_TRAIN_SEED, live_seed: int = FIG4_LIVE_SEED,
                      every: int = FIG4_EVERY, count: int = FIG4_COUNT,
                      shift_at: int = FIG4_SHIFT_AT) -> list[dict]:
    """Scores every ``every`` steps for each window size, partial windows included.

    ``t`` counts observations ingested so far (one observation per time step).
    """
    base = build_baseline(gen_stationary(100.0, 10.0, 10_000, train_seed, feature=FEATURE))
    if scenario == "stationary":
        live = gen_stationary(100.0, 10.0, count, live_seed, feature=FEATURE)
    elif scenario == "shift":
        live = gen_shift(100.0, 90.0, 10.0, shift_at, count, live_seed, feature=FEATURE)
    else:
        raise ValueError(f"unknown scenario {scenario!r}")
    rows = []
    for n in windows:
        cfg = MonitorConfig(features=(FEATURE,), window_n=n, eval_every_observations=every,
                            evaluate_partial=True, min_partial_fill=min(10, n))
        engine = MonitorEngine(cfg, base)
        for o in live:
            tick = engine.ingest(o)
            if tick is None:
                continue
            r = tick.reports[0]
            if r.scored:
                rows.append({"scenario": scenario, "n": n, "t": engine.observations, "eval_ts": r.eval_ts,
                             "score": r.score, "window_fill": r.window_fill, "partial": r.partial})
    return rows


def figure4(**kw) -> list[dict]:
    return window_experiment("stationary", **kw) + window_experiment("shift", **kw)


def seasonal_experiment(*, train_seed: int = FIG5_TRAIN_SEED, live_seed: int = FIG5_LIVE_SEED,
                        train_days: int = FIG5_TRAIN_DAYS, window: int = FIG5_WINDOW,
                        every: int = FIG5_EVERY, amplitude: float = 300.0,
                        noise_sigma: float = 50.0, bucket_minutes: int = 60) -> list[dict]:
    """One live day scored against the global and the time-of-day baselines."""
    train = gen_seasonal(1000.0, amplitude, noise_sigma, train_days, train_seed, feature=SEASONAL_FEATURE)
    base = build_baseline(train, BuildConfig(bucket_minutes=bucket_minutes, seasonal=True, seed=train_seed))
    live = gen_seasonal(1000.0, amplitude, noise_sigma, 1, live_seed, start_ts=train_days * MS_PER_DAY,
                        feature=SEASONAL_FEATURE)
    rows = []
    for mode in ("global", "seasonal"):
        cfg = MonitorConfig(features=(SEASONAL_FEATURE,), window_n=window,
                            eval_every_observations=every, baseline_mode=mode)
        for tick in MonitorEngine(cfg, base).run(live):
            r = tick.reports[0]
            if r.scored:
                rows.append({"baseline": mode, "eval_ts": r.eval_ts,
                             "minute_of_day": (r.eval_ts % MS_PER_DAY) // 60_000,
                             "score": r.score, "baseline_kind": r.baseline_kind})
    return rows


def figure5(**kw) -> list[dict]:
    return seasonal_experiment(**kw)


def write_rows(rows: Iterable[dict], columns: Sequence[str], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([f"{v:.9g}" if isinstance(v, float) else
                    ("true" if v is True else "false" if v is False else v)
                    for v in (row[c] for c in columns)])


def ingest_throughput(count: int = 200_000, window: int = 1000, every: int = 100, seed: int = 7) -> dict:
    """Single-feature observations per second through the engine, scoring included."""
    base = build_baseline(gen_stationary(100.0, 10.0, 10_000, seed, feature=FEATURE))
    stream = gen_stationary(100.0, 10.0, count, seed + 1, feature=FEATURE)
    engine = MonitorEngine(MonitorConfig(features=(FEATURE,), window_n=window,
                                         eval_every_observations=every), base)
    start = time.perf_counter()
    for o in stream:
        engine.ingest(o)
    elapsed = time.perf_counter() - start
    return {"observations": count, "seconds": elapsed, "obs_per_second": count / elapsed,
            "evaluations": engine.ticks, "window_n": window, "eval_every": every}
