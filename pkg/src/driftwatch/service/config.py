from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..baseline import BuildConfig
from ..errors import ConfigError
from ..monitor import AlertPolicy, MonitorConfig
from ..sinks import LogFileSink, WebhookSink

CONFIG_ENV = "DRIFTWATCH_CONFIG"


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class EvalEvery(_Strict):
    observations: int | None = Field(default=None, ge=1)
    seconds: float | None = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.observations is None) == (self.seconds is None):
            raise ValueError('eval_every needs exactly one of "observations" or "seconds"')
        return self


class MonitorSettings(_Strict):
    features: list[str] = Field(min_length=1)
    window_n: int | dict[str, int] = 1000
    eval_every: EvalEvery = EvalEvery(observations=100)
    metric: Literal["wasserstein", "wasserstein_binned", "kl"] = "wasserstein"
    baseline_mode: Literal["global", "seasonal"] = "global"
    evaluate_partial: bool = False
    min_partial_fill: int = Field(default=10, ge=1)
    bins: int = Field(default=256, ge=1)
    kl_eps: float = Field(default=1e-9, gt=0)
    seasonal_anchor: Literal["window_mid", "eval_time"] = "window_mid"

    def to_core(self) -> MonitorConfig:
        return MonitorConfig(
            features=tuple(self.features),
            window_n=self.window_n,
            eval_every_observations=self.eval_every.observations,
            eval_every_seconds=self.eval_every.seconds,
            metric=self.metric,
            baseline_mode=self.baseline_mode,
            evaluate_partial=self.evaluate_partial,
            min_partial_fill=self.min_partial_fill,
            bins=self.bins,
            kl_eps=self.kl_eps,
            seasonal_anchor=self.seasonal_anchor,
        )


class PolicySettings(_Strict):
    threshold: float | dict[str, float]
    consecutive_breaches_m: int = Field(default=3, ge=1)
    cooldown_evals: int = Field(default=10, ge=0)

    def to_core(self, threshold=None) -> AlertPolicy:
        return AlertPolicy(
            threshold=self.threshold if threshold is None else threshold,
            consecutive_breaches_m=self.consecutive_breaches_m,
            cooldown_evals=self.cooldown_evals,
        )


class CalibrationSettings(_Strict):
    input: str
    quantile: float = Field(default=0.999, gt=0, lt=1)
    safety: float = Field(default=1.1, ge=1)
    consecutive_breaches_m: int = Field(default=3, ge=1)
    cooldown_evals: int = Field(default=10, ge=0)


class BuildSettings(_Strict):
    bucket_minutes: int = 60
    sample_cap: int = Field(default=10_000, ge=1)
    seed: int = 0
    seasonal: bool = False
    sparsity_floor: int = Field(default=100, ge=1)

    def to_core(self) -> BuildConfig:
        return BuildConfig(**self.model_dump())


class LogFileSinkSettings(_Strict):
    type: Literal["log_file"]
    path: str

    def build(self):
        return LogFileSink(self.path)


class WebhookSinkSettings(_Strict):
    type: Literal["webhook"]
    url: str
    retry: int = Field(default=3, ge=1)
    backoff_ms: int = Field(default=500, ge=0)

    def build(self):
        return WebhookSink(self.url, retry=self.retry, backoff_ms=self.backoff_ms)


SinkSettings = Annotated[Union[LogFileSinkSettings, WebhookSinkSettings], Field(discriminator="type")]


class ServiceConfig(_Strict):
    listen: str = "127.0.0.1:8080"
    monitor: MonitorSettings
    policy: PolicySettings | Literal["auto"]
    calibration: CalibrationSettings | None = None
    baseline: str | None = None
    baseline_build: BuildSettings | None = None
    sinks: list[SinkSettings] = Field(min_length=1)
    queue_capacity: int = Field(default=100_000, ge=1)
    report_csv: str | None = None
    clock: Literal["wall", "event"] = "wall"

    @model_validator(mode="after")
    def _auto_needs_calibration(self):
        if self.policy == "auto" and self.calibration is None:
            raise ValueError('policy "auto" needs a calibration section with an input stream')
        return self

    def host_port(self) -> tuple[str, int]:
        return parse_listen(self.listen)


def parse_listen(addr: str) -> tuple[str, int]:
    host, _, port = addr.rpartition(":")
    if not host or not port.isdigit():
        raise ConfigError(f"listen address must be host:port, got {addr!r}")
    return host, int(port)


def config_path(explicit: str | None) -> str:
    path = explicit or os.environ.get(CONFIG_ENV)
    if not path:
        raise ConfigError(f"no config given: pass --config or set {CONFIG_ENV}")
    return path


def load_service_config(path) -> ServiceConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    try:
        return ServiceConfig.model_validate(doc)
    except ValidationError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
