import json

import httpx

from driftwatch.monitor import Alert
from driftwatch.sinks import LogFileSink, WebhookSink, emit_alert


def _alert():
    return Alert(feature="order_total", first_breach_ts=3000, alert_ts=5000, score=12.5,
                 threshold=2.0, consecutive_breaches=3)


def _client(statuses, seen):
    it = iter(statuses)

    def handler(request):
        seen.append(json.loads(request.content))
        code = next(it)
        if code is None:
            raise httpx.ConnectError("refused", request=request)
        return httpx.Response(code)

    return httpx.Client(transport=httpx.MockTransport(handler))


def test_webhook_retries_until_success():
    seen = []
    sink = WebhookSink("http://hook/x", retry=3, backoff_ms=0, client=_client([500, 500, 200], seen))
    r = sink.send(_alert())
    assert r.delivered and r.attempts == 3
    assert len(seen) == 3 and seen[0]["feature"] == "order_total"


def test_webhook_down_is_logged_not_raised(tmp_path, caplog):
    seen = []
    hook = WebhookSink("http://hook/x", retry=3, backoff_ms=0, client=_client([None] * 3, seen))
    log_sink = LogFileSink(tmp_path / "alerts.jsonl")
    results = emit_alert(_alert(), [hook, log_sink])
    assert [r.delivered for r in results] == [False, True]
    assert results[0].attempts == 3 and "ConnectError" in results[0].error
    assert "undelivered" in caplog.text
    assert len((tmp_path / "alerts.jsonl").read_text().splitlines()) == 1


def test_log_sink_appends_jsonl(tmp_path):
    p = tmp_path / "alerts.jsonl"
    sink = LogFileSink(p)
    sink.send(_alert())
    sink.send(_alert())
    lines = p.read_text().splitlines()
    assert len(lines) == 2
    doc = json.loads(lines[0])
    assert doc["first_breach_ts"] == 3000 and doc["score"] == 12.5
    assert doc["suspected_causes"] == ["upstream data fault", "natural distribution shift"]


def test_crashing_sink_is_contained():
    class Boom:
        name = "boom"

        def send(self, a):
            raise RuntimeError("nope")

    (r,) = emit_alert(_alert(), [Boom()])
    assert not r.delivered and r.error == "nope"
