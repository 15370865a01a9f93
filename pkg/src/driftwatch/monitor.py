"""Monitoring engine: per-feature windows, periodic scoring, debounced alerts."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .baseline import BaselineSet, Lookup, lookup
from .distribution import EmpiricalSample, Observation, SlidingWindow
from .errors import ConfigError, InsufficientScores
from .metrics import DEFAULT_BINS, DEFAULT_KL_EPS, default_edges, histogram, kl_divergence, wasserstein, wasserstein_binned

log = logging.getLogger(__name__)

METRICS = ("wasserstein", "wasserstein_binned", "kl")
BASELINE_MODES = ("global", "seasonal")
SEASONAL_ANCHORS = ("window_mid", "eval_time")
SUSPECTED_CAUSES = ("upstream data fault", "natural distribution shift")
REPORT_COLUMNS = ("eval_ts", "feature", "metric", "baseline_kind", "score", "threshold", "breach", "window_fill", "partial")


@dataclass(frozen=True)
class MonitorConfig:
    features: tuple[str, ...]
    window_n: int | Mapping[str, int] = 1000
    eval_every_observations: int | None = 100
    eval_every_seconds: float | None = None
    metric: str = "wasserstein"
    baseline_mode: str = "global"
    evaluate_partial: bool = False
    min_partial_fill: int = 10
    bins: int = DEFAULT_BINS
    kl_eps: float = DEFAULT_KL_EPS
    seasonal_anchor: str = "window_mid"

    def __post_init__(self):
        if not self.features:
            raise ConfigError("at least one feature must be monitored")
        object.__setattr__(self, "features", tuple(self.features))
        sizes = self.window_n.values() if isinstance(self.window_n, Mapping) else [self.window_n]
        if any(int(n) < 1 for n in sizes):
            raise ConfigError("window_n must be >= 1")
        if isinstance(self.window_n, Mapping):
            missing = set(self.features) - set(self.window_n)
            if missing:
                raise ConfigError(f"window_n missing for {sorted(missing)}")
        k, t = self.eval_every_observations, self.eval_every_seconds
        if (k is None) == (t is None):
            raise ConfigError("set exactly one of eval_every observations or seconds")
        if k is not None and k < 1:
            raise ConfigError("eval_every observations must be >= 1")
        if t is not None and not t > 0:
            raise ConfigError("eval_every seconds must be > 0")
        if self.metric not in METRICS:
            raise ConfigError(f"metric must be one of {METRICS}")
        if self.baseline_mode not in BASELINE_MODES:
            raise ConfigError(f"baseline_mode must be one of {BASELINE_MODES}")
        if self.seasonal_anchor not in SEASONAL_ANCHORS:
            raise ConfigError(f"seasonal_anchor must be one of {SEASONAL_ANCHORS}")
        if self.min_partial_fill < 1:
            raise ConfigError("min_partial_fill must be >= 1")

    def window_size(self, feature: str) -> int:
        if isinstance(self.window_n, Mapping):
            return int(self.window_n[feature])
        return int(self.window_n)

    @classmethod
    def from_dict(cls, d: Mapping) -> "MonitorConfig":
        d = dict(d)
        every = d.pop("eval_every", {"observations": 100})
        if not isinstance(every, Mapping) or len(every) != 1 or not set(every) <= {"observations", "seconds"}:
            raise ConfigError('eval_every must be {"observations": k} or {"seconds": t}')
        kwargs = {k: d[k] for k in (
            "window_n", "metric", "baseline_mode", "evaluate_partial",
            "min_partial_fill", "bins", "kl_eps", "seasonal_anchor") if k in d}
        unknown = set(d) - set(kwargs) - {"features"}
        if unknown:
            raise ConfigError(f"unknown monitor settings {sorted(unknown)}")
        return cls(
            features=tuple(d.get("features") or ()),
            eval_every_observations=every.get("observations"),
            eval_every_seconds=every.get("seconds"),
            **kwargs,
        )


@dataclass(frozen=True)
class AlertPolicy:
    threshold: float | Mapping[str, float]
    consecutive_breaches_m: int = 3
    cooldown_evals: int = 10

    def __post_init__(self):
        values = self.threshold.values() if isinstance(self.threshold, Mapping) else [self.threshold]
        if any(not float(v) >= 0 for v in values):
            raise ConfigError("thresholds must be non-negative")
        if self.consecutive_breaches_m < 1:
            raise ConfigError("consecutive_breaches_m must be >= 1")
        if self.cooldown_evals < 0:
            raise ConfigError("cooldown_evals must be >= 0")

    def threshold_for(self, feature: str) -> float:
        if isinstance(self.threshold, Mapping):
            return float(self.threshold[feature])
        return float(self.threshold)

    @classmethod
    def from_dict(cls, d: Mapping) -> "AlertPolicy":
        return cls(
            threshold=d["threshold"],
            consecutive_breaches_m=int(d.get("consecutive_breaches_m", 3)),
            cooldown_evals=int(d.get("cooldown_evals", 10)),
        )


@dataclass(frozen=True)
class DriftReport:
    feature: str
    eval_ts: int
    metric: str
    status: str  # "ok" | "skipped" | "error"
    score: float | None = None
    baseline_kind: str = ""
    threshold: float | None = None
    breach: bool = False
    window_fill: int = 0
    partial: bool = False
    detail: str = ""

    @property
    def scored(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class Alert:
    feature: str
    first_breach_ts: int
    alert_ts: int
    score: float
    threshold: float
    consecutive_breaches: int
    suspected_causes: tuple[str, ...] = SUSPECTED_CAUSES

    def to_json(self) -> dict:
        return {
            "feature": self.feature,
            "alert_ts": self.alert_ts,
            "first_breach_ts": self.first_breach_ts,
            "score": self.score,
            "threshold": self.threshold,
            "consecutive_breaches": self.consecutive_breaches,
            "suspected_causes": list(self.suspected_causes),
        }


@dataclass
class _FeatureGate:
    run: int = 0
    first_breach_ts: int | None = None
    alerted_in_run: bool = False
    cooldown_left: int = 0


class PolicyState:
    """Consecutive-breach debouncing with a per-feature cooldown.

    A run of breaches raises at most one alert, once it reaches ``m``
    reports; after an alert no further alert fires for ``cooldown_evals``
    scored reports of that feature. Skipped and error reports are ignored.
    """

    def __init__(self, policy: AlertPolicy):
        self.policy = policy
        self._gates: dict[str, _FeatureGate] = {}

    def apply(self, r: DriftReport) -> Alert | None:
        if not r.scored:
            return None
        g = self._gates.setdefault(r.feature, _FeatureGate())
        in_cooldown = g.cooldown_left > 0
        if in_cooldown:
            g.cooldown_left -= 1
        if not r.breach:
            g.run = 0
            g.first_breach_ts = None
            g.alerted_in_run = False
            return None
        g.run += 1
        if g.first_breach_ts is None:
            g.first_breach_ts = r.eval_ts
        if g.run < self.policy.consecutive_breaches_m or g.alerted_in_run or in_cooldown:
            return None
        g.alerted_in_run = True
        g.cooldown_left = self.policy.cooldown_evals
        return Alert(
            feature=r.feature,
            first_breach_ts=g.first_breach_ts,
            alert_ts=r.eval_ts,
            score=float(r.score),
            threshold=float(r.threshold),
            consecutive_breaches=g.run,
        )


def apply_policy(state: PolicyState, r: DriftReport) -> Alert | None:
    return state.apply(r)


@dataclass
class Tick:
    eval_ts: int
    reports: list[DriftReport]
    alerts: list[Alert] = field(default_factory=list)


class MonitorEngine:
    """Feeds observations into per-feature windows and scores them on cadence.

    With ``event_time=True`` every cadence decision is taken from observation
    timestamps, so a replayed stream produces bit-identical output. With
    ``event_time=False`` and a seconds cadence, the caller drives :meth:`tick`
    from a wall clock.
    """

    def __init__(self, config: MonitorConfig, baseline: BaselineSet,
                 policy: AlertPolicy | None = None, *, event_time: bool = True):
        self.config = config
        self.baseline = baseline
        self.policy = policy
        self.event_time = event_time
        self.windows = {f: SlidingWindow(config.window_size(f)) for f in config.features}
        self.policy_state = PolicyState(policy) if policy else None
        self.observations = 0
        self.ignored_features = 0
        self.ticks = 0
        self.last_reports: dict[str, DriftReport] = {}
        self._next_eval_ms: int | None = None
        self._hist_cache: dict[tuple[str, int], tuple] = {}

    # -- ingestion ---------------------------------------------------------

    def ingest(self, o: Observation) -> Tick | None:
        """Push one observation; returns the tick it triggered, if any."""
        tick = None
        seconds = self.config.eval_every_seconds
        if seconds is not None and self.event_time:
            step = int(round(seconds * 1000))
            if self._next_eval_ms is None:
                self._next_eval_ms = o.ts + step
            elif o.ts >= self._next_eval_ms:
                boundary = self._next_eval_ms + (o.ts - self._next_eval_ms) // step * step
                tick = self.tick(boundary)
                self._next_eval_ms = boundary + step
        windows = self.windows
        for name, x in o.values.items():
            w = windows.get(name)
            if w is None:
                self.ignored_features += 1
            else:
                w.push(x, o.ts)
        self.observations += 1
        k = self.config.eval_every_observations
        if k is not None and self.observations % k == 0:
            tick = self.tick(o.ts)
        return tick

    def run(self, stream: Iterable[Observation]) -> list[Tick]:
        ticks = []
        for o in stream:
            t = self.ingest(o)
            if t is not None:
                ticks.append(t)
        return ticks

    # -- evaluation --------------------------------------------------------

    def _reference(self, feature: str, window: SlidingWindow, now: int) -> Lookup:
        anchor = now
        if self.config.baseline_mode == "seasonal" and self.config.seasonal_anchor == "window_mid":
            span = window.time_span()
            if span is not None:
                anchor = (span[0] + span[1]) // 2
        return lookup(self.baseline, feature, anchor, self.config.baseline_mode)

    def _binned_reference(self, feature: str, ref: EmpiricalSample):
        key = (feature, id(ref))
        hit = self._hist_cache.get(key)
        if hit is None or hit[1] is not ref:
            edges = default_edges(ref, self.config.bins)
            hit = (edges, ref, histogram(ref, edges))
            self._hist_cache[key] = hit
        return hit[0], hit[2]

    def score(self, feature: str, live: EmpiricalSample, ref: EmpiricalSample) -> float:
        metric = self.config.metric
        if metric == "wasserstein":
            return wasserstein(live, ref)
        edges, ref_hist = self._binned_reference(feature, ref)
        live_hist = histogram(live, edges)
        if metric == "wasserstein_binned":
            return wasserstein_binned(live_hist, ref_hist)
        return kl_divergence(live_hist, ref_hist, self.config.kl_eps)

    def evaluate(self, now: int) -> list[DriftReport]:
        """Score every feature against its baseline; windows are not modified."""
        cfg = self.config
        reports = []
        for feature in cfg.features:
            w = self.windows[feature]
            fill = len(w)
            ready = fill == w.capacity or (cfg.evaluate_partial and fill >= cfg.min_partial_fill)
            if not ready:
                reports.append(DriftReport(feature, now, cfg.metric, "skipped", window_fill=fill,
                                           partial=fill < w.capacity, detail="window below fill policy"))
                continue
            threshold = self.policy.threshold_for(feature) if self.policy else None
            try:
                live, partial = w.snapshot()
                ref = self._reference(feature, w, now)
                s = self.score(feature, live, ref.sample)
            except Exception as exc:  # one bad feature must not sink the tick
                log.error("feature %s: evaluation failed: %s", feature, exc)
                reports.append(DriftReport(feature, now, cfg.metric, "error", window_fill=fill,
                                           partial=fill < w.capacity, detail=f"{type(exc).__name__}: {exc}"))
                continue
            reports.append(DriftReport(
                feature=feature, eval_ts=now, metric=cfg.metric, status="ok", score=s,
                baseline_kind=ref.label, threshold=threshold,
                breach=threshold is not None and s > threshold,
                window_fill=fill, partial=partial,
            ))
        return reports

    def tick(self, now: int) -> Tick:
        reports = self.evaluate(now)
        alerts = []
        for r in reports:
            if r.scored:
                self.last_reports[r.feature] = r
            if self.policy_state is not None:
                a = self.policy_state.apply(r)
                if a is not None:
                    alerts.append(a)
        self.ticks += 1
        return Tick(now, reports, alerts)

    def status(self) -> dict:
        feats = {}
        for name, w in self.windows.items():
            last = self.last_reports.get(name)
            feats[name] = {
                "window_fill": len(w),
                "window_n": w.capacity,
                "total_accepted": w.total_accepted,
                "dropped_nonfinite": w.dropped_nonfinite,
                "last_score": None if last is None else last.score,
                "last_eval_ts": None if last is None else last.eval_ts,
                "last_breach": None if last is None else last.breach,
            }
        return {
            "observations": self.observations,
            "ignored_features": self.ignored_features,
            "evaluations": self.ticks,
            "features": feats,
        }


def calibrate(scores: Mapping[str, Sequence[float]], q: float = 0.999, safety: float = 1.1,
              min_scores: int = 100) -> dict[str, float]:
    """Per-feature threshold = safety * empirical q-quantile of drift-free scores."""
    if not 0 < q < 1:
        raise ValueError("quantile must lie in (0, 1)")
    if safety < 1:
        raise ValueError("safety factor must be >= 1")
    out = {}
    for feature in sorted(scores):
        xs = np.asarray(scores[feature], dtype=np.float64)
        if xs.size < min_scores:
            raise InsufficientScores(f"{feature}: {xs.size} scores, need at least {min_scores}")
        out[feature] = float(safety * np.quantile(xs, q))
    if not out:
        raise InsufficientScores("no scores supplied")
    return out


def collect_scores(config: MonitorConfig, baseline: BaselineSet,
                   stream: Iterable[Observation]) -> dict[str, list[float]]:
    """Run ``stream`` through a policy-free engine and gather scores per feature."""
    engine = MonitorEngine(config, baseline)
    scores: dict[str, list[float]] = {f: [] for f in config.features}
    for o in stream:
        t = engine.ingest(o)
        if t is None:
            continue
        for r in t.reports:
            if r.scored:
                scores[r.feature].append(r.score)
    return scores


# -- report stream ----------------------------------------------------------


def _real(x: float | None) -> str:
    return "" if x is None else f"{x:.9g}"


def report_row(r: DriftReport) -> list[str]:
    return [str(r.eval_ts), r.feature, r.metric, r.baseline_kind, _real(r.score),
            _real(r.threshold), "true" if r.breach else "false", str(r.window_fill),
            "true" if r.partial else "false"]


class ReportWriter:
    """CSV report stream; one row per scored report, header first."""

    def __init__(self, fh):
        self._w = csv.writer(fh, lineterminator="\n")
        self._fh = fh
        self._w.writerow(REPORT_COLUMNS)

    def write(self, reports: Iterable[DriftReport]) -> None:
        for r in reports:
            if r.scored:
                self._w.writerow(report_row(r))

    def flush(self) -> None:
        self._fh.flush()


def reports_to_csv(reports: Iterable[DriftReport]) -> str:
    buf = io.StringIO()
    ReportWriter(buf).write(reports)
    return buf.getvalue()
