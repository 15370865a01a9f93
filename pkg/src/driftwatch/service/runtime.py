"""Wiring shared by the HTTP service and the offline CLI commands."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

from ..baseline import BaselineSet
from ..monitor import Alert, AlertPolicy, MonitorEngine, ReportWriter, calibrate, collect_scores
from ..distribution import Observation
from ..sinks import emit_alert
from ..wire import read_observations
from .config import ServiceConfig

log = logging.getLogger(__name__)


def resolve_policy(cfg: ServiceConfig, baseline: BaselineSet) -> AlertPolicy:
    """Turn the configured policy into an AlertPolicy, calibrating if it is "auto"."""
    if cfg.policy != "auto":
        return cfg.policy.to_core()
    cal = cfg.calibration
    scores = collect_scores(cfg.monitor.to_core(), baseline, read_observations(cal.input))
    thresholds = calibrate(scores, cal.quantile, cal.safety)
    log.info("calibrated thresholds: %s", json.dumps(thresholds, sort_keys=True))
    return AlertPolicy(thresholds, cal.consecutive_breaches_m, cal.cooldown_evals)


def build_engine(cfg: ServiceConfig, baseline: BaselineSet, policy: AlertPolicy | None = None,
                 *, event_time: bool | None = None) -> MonitorEngine:
    if event_time is None:
        event_time = cfg.clock == "event" or cfg.monitor.eval_every.seconds is None
    return MonitorEngine(cfg.monitor.to_core(), baseline, policy or resolve_policy(cfg, baseline),
                         event_time=event_time)


def build_sinks(cfg: ServiceConfig) -> list:
    return [s.build() for s in cfg.sinks]


@dataclass
class ReplayResult:
    observations: int = 0
    evaluations: int = 0
    reports: int = 0
    alerts: list[Alert] = field(default_factory=list)


def replay(engine: MonitorEngine, stream: Iterable[Observation], report_fh: IO[str],
           sinks: Sequence = ()) -> ReplayResult:
    """Event-time run of a recorded stream: report CSV out, alerts to sinks."""
    writer = ReportWriter(report_fh)
    out = ReplayResult()
    for o in stream:
        out.observations += 1
        tick = engine.ingest(o)
        if tick is None:
            continue
        out.evaluations += 1
        writer.write(tick.reports)
        out.reports += sum(r.scored for r in tick.reports)
        for a in tick.alerts:
            out.alerts.append(a)
            emit_alert(a, sinks)
    writer.flush()
    return out
