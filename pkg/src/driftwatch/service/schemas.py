from __future__ import annotations

from pydantic import BaseModel

from ..wire import ObservationIn

__all__ = ["ObservationIn", "LineErrorOut", "IngestResponse", "FeatureStatus", "StatusResponse"]


class LineErrorOut(BaseModel):
    line: int
    error: str


class IngestResponse(BaseModel):
    accepted: int
    dropped: int
    first_error: LineErrorOut | None = None


class FeatureStatus(BaseModel):
    window_fill: int
    window_n: int
    total_accepted: int
    dropped_nonfinite: int
    last_score: float | None = None
    last_eval_ts: int | None = None
    last_breach: bool | None = None


class StatusResponse(BaseModel):
    observations: int
    ignored_features: int
    evaluations: int
    queue_depth: int
    queue_capacity: int
    alerts_emitted: int
    alerts_undelivered: int
    features: dict[str, FeatureStatus]
