from __future__ import annotations

import asyncio
import contextlib
import logging
import time
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from ..baseline import BaselineSet
from ..monitor import AlertPolicy, MonitorEngine, ReportWriter, Tick
from ..sinks import emit_alert
from ..wire import LineError, parse_line
from .config import ServiceConfig
from .runtime import build_engine, build_sinks
from .schemas import IngestResponse, LineErrorOut, StatusResponse

log = logging.getLogger(__name__)


class ServiceState:
    """Engine plus the queues that decouple HTTP, scoring and alert delivery.

    A single worker task owns the engine: it drains the ingest queue in
    arrival order and runs count-based evaluations inline. Wall-clock
    evaluations run on the same event loop, so they never interleave with a
    half-applied observation. Alerts go to a separate delivery task so slow
    sinks never hold up ingestion.
    """

    def __init__(self, cfg: ServiceConfig, engine: MonitorEngine, sinks: list):
        self.cfg = cfg
        self.engine = engine
        self.sinks = sinks
        self.queue: asyncio.Queue | None = None
        self.alert_queue: asyncio.Queue | None = None
        self.alerts_emitted = 0
        self.alerts_undelivered = 0
        self._report_fh = None
        self._writer: ReportWriter | None = None
        self._tasks: list[asyncio.Task] = []
        self._running: asyncio.Event | None = None

    async def start(self) -> None:
        self.queue = asyncio.Queue(maxsize=self.cfg.queue_capacity)
        self.alert_queue = asyncio.Queue()
        self._running = asyncio.Event()
        self._running.set()
        if self.cfg.report_csv:
            self._report_fh = Path(self.cfg.report_csv).open("w", newline="")
            self._writer = ReportWriter(self._report_fh)
        self._tasks.append(asyncio.create_task(self._ingest_loop()))
        self._tasks.append(asyncio.create_task(self._deliver_loop()))
        seconds = self.cfg.monitor.eval_every.seconds
        if seconds is not None and not self.engine.event_time:
            self._tasks.append(asyncio.create_task(self._clock_loop(seconds)))

    def pause(self) -> None:
        """Hold processing; accepted observations keep buffering in the queue."""
        self._running.clear()

    def resume(self) -> None:
        self._running.set()

    async def stop(self) -> None:
        # accepted observations are processed before shutdown completes
        self.resume()
        await self.queue.join()
        await self.alert_queue.join()
        for t in self._tasks:
            t.cancel()
        for t in self._tasks:
            with contextlib.suppress(asyncio.CancelledError):
                await t
        if self._report_fh is not None:
            self._report_fh.close()
        for s in self.sinks:
            close = getattr(s, "close", None)
            if close:
                close()

    def _handle_tick(self, tick: Tick | None) -> None:
        if tick is None:
            return
        if self._writer is not None:
            self._writer.write(tick.reports)
            self._writer.flush()
        for a in tick.alerts:
            self.alerts_emitted += 1
            self.alert_queue.put_nowait(a)

    async def _ingest_loop(self) -> None:
        while True:
            obs = await self.queue.get()
            await self._running.wait()
            try:
                self._handle_tick(self.engine.ingest(obs))
            except Exception:
                log.exception("ingest failed at ts=%s", obs.ts)
            finally:
                self.queue.task_done()

    async def _clock_loop(self, seconds: float) -> None:
        while True:
            await asyncio.sleep(seconds)
            try:
                self._handle_tick(self.engine.tick(int(time.time() * 1000)))
            except Exception:
                log.exception("scheduled evaluation failed")

    async def _deliver_loop(self) -> None:
        while True:
            alert = await self.alert_queue.get()
            try:
                results = await asyncio.to_thread(emit_alert, alert, self.sinks)
                if not all(r.delivered for r in results):
                    self.alerts_undelivered += 1
            finally:
                self.alert_queue.task_done()

    def status(self) -> dict:
        snap = self.engine.status()
        snap.update(
            queue_depth=self.queue.qsize() if self.queue else 0,
            queue_capacity=self.cfg.queue_capacity,
            alerts_emitted=self.alerts_emitted,
            alerts_undelivered=self.alerts_undelivered,
        )
        return snap


def create_app(cfg: ServiceConfig, baseline: BaselineSet, *, policy: AlertPolicy | None = None,
               sinks: list | None = None) -> FastAPI:
    engine = build_engine(cfg, baseline, policy)
    state = ServiceState(cfg, engine, build_sinks(cfg) if sinks is None else sinks)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        await state.start()
        try:
            yield
        finally:
            await state.stop()

    app = FastAPI(title="driftwatch", lifespan=lifespan)
    app.state.monitor = state

    @app.post("/v1/observations", status_code=202, response_model=IngestResponse,
              response_model_exclude_none=True)
    async def post_observations(request: Request):
        body = await request.body()
        try:
            text = body.decode("utf-8")
        except UnicodeDecodeError:
            return JSONResponse({"error": "body is not UTF-8 NDJSON"}, status_code=400)
        valid, dropped, first_error = [], 0, None
        for i, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                valid.append(parse_line(line, i))
            except LineError as exc:
                dropped += 1
                if first_error is None:
                    first_error = LineErrorOut(line=exc.line, error=exc.message)
        if not valid:
            detail = {"error": "no parseable observation lines"}
            if first_error is not None:
                detail["first_error"] = first_error.model_dump()
            return JSONResponse(detail, status_code=400)
        q = state.queue
        if len(valid) > q.maxsize:
            return JSONResponse({"error": f"batch of {len(valid)} exceeds queue capacity {q.maxsize}"},
                                status_code=413)
        if q.maxsize - q.qsize() < len(valid):
            return JSONResponse({"error": "ingest queue full", "queue_depth": q.qsize()},
                                status_code=429, headers={"Retry-After": "1"})
        for o in valid:
            q.put_nowait(o)
        return IngestResponse(accepted=len(valid), dropped=dropped, first_error=first_error)

    @app.get("/v1/status", response_model=StatusResponse)
    async def status():
        return state.status()

    @app.get("/v1/healthz", response_class=PlainTextResponse)
    async def healthz():
        return "ok"

    return app
