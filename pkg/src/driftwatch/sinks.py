"""Alert delivery: append-only JSONL log and webhook POST with retries."""

from __future__ import annotations

import json
import logging
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import httpx

from .monitor import Alert

log = logging.getLogger(__name__)


@dataclass
class DeliveryResult:
    sink: str
    delivered: bool
    attempts: int
    error: str | None = None


def alert_line(a: Alert) -> str:
    return json.dumps(a.to_json(), separators=(",", ":"))


class LogFileSink:
    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()

    @property
    def name(self) -> str:
        return f"log_file:{self.path}"

    def send(self, a: Alert) -> DeliveryResult:
        try:
            with self._lock, self.path.open("a") as fh:
                fh.write(alert_line(a) + "\n")
        except OSError as exc:
            log.error("alert log %s unwritable: %s", self.path, exc)
            return DeliveryResult(self.name, False, 1, str(exc))
        return DeliveryResult(self.name, True, 1)


class WebhookSink:
    """POSTs the alert JSON; ``retry`` is the total number of attempts."""

    def __init__(self, url: str, retry: int = 3, backoff_ms: int = 500,
                 timeout: float = 5.0, client: httpx.Client | None = None):
        self.url = url
        self.retry = max(1, retry)
        self.backoff_ms = backoff_ms
        self._client = client or httpx.Client(timeout=timeout)

    @property
    def name(self) -> str:
        return f"webhook:{self.url}"

    def send(self, a: Alert) -> DeliveryResult:
        body = alert_line(a)
        error = None
        for attempt in range(1, self.retry + 1):
            try:
                resp = self._client.post(self.url, content=body, headers={"Content-Type": "application/json"})
                if 200 <= resp.status_code < 300:
                    return DeliveryResult(self.name, True, attempt)
                error = f"HTTP {resp.status_code}"
            except httpx.HTTPError as exc:
                error = f"{type(exc).__name__}: {exc}"
            log.warning("webhook %s attempt %d/%d failed: %s", self.url, attempt, self.retry, error)
            if attempt < self.retry and self.backoff_ms > 0:
                time.sleep(self.backoff_ms * 2 ** (attempt - 1) / 1000)
        log.error("alert for %s undelivered to %s after %d attempts", a.feature, self.url, self.retry)
        return DeliveryResult(self.name, False, self.retry, error)

    def close(self) -> None:
        self._client.close()


def emit_alert(a: Alert, sinks: Sequence) -> list[DeliveryResult]:
    """Deliver to every sink; failures are logged and reported, never raised."""
    results = []
    for sink in sinks:
        try:
            results.append(sink.send(a))
        except Exception as exc:
            log.exception("sink %s crashed", getattr(sink, "name", sink))
            results.append(DeliveryResult(getattr(sink, "name", repr(sink)), False, 0, str(exc)))
    return results
