"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 input or I/O error, 3 internal
invariant violation. Failures print one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import baseline as bl
from . import experiments, simgen
from .errors import (BadBucketWidth, BadParams, ConfigError, CorruptFile, DriftwatchError, EmptyTraining,
                     FormatVersionMismatch, InsufficientScores)
from .monitor import calibrate, collect_scores
from .wire import LineError, read_observations, write_ndjson

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_BUG = 0, 1, 2, 3

_INPUT_ERRORS = (OSError, LineError, ConfigError, CorruptFile, FormatVersionMismatch, EmptyTraining,
                 InsufficientScores, BadParams, BadBucketWidth, json.JSONDecodeError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fail(code: int, exc: BaseException) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}), file=sys.stderr)
    return code


def _service_config(path: str | None):
    from .service.config import config_path, load_service_config

    try:
        path = config_path(path)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    return load_service_config(path)


# -- subcommands -----------------------------------------------------------


def cmd_baseline_build(args) -> int:
    from .service.config import BuildSettings

    doc = json.loads(Path(args.config).read_text()) if args.config else {}
    if "baseline_build" in doc:
        doc = doc["baseline_build"] or {}
    try:
        cfg = BuildSettings.model_validate(doc).to_core()
    except ValueError as exc:
        raise ConfigError(f"{args.config}: {exc}") from exc
    b = bl.build_baseline(read_observations(args.input), cfg)
    bl.save(b, args.out)
    if args.export_json:
        bl.export_json(b, args.export_json)
    print(json.dumps({"out": args.out, "features": b.feature_names(),
                      "raw_counts": {f: b.features[f].raw_count for f in b.feature_names()}}))
    return EXIT_OK


def cmd_baseline_export(args) -> int:
    bl.export_json(bl.load(args.baseline), args.out)
    return EXIT_OK


def cmd_monitor_run(args) -> int:
    import uvicorn

    from .service import create_app
    from .service.config import parse_listen

    cfg = _service_config(args.config)
    baseline_path = args.baseline or cfg.baseline
    if not baseline_path:
        raise UsageError("no baseline: pass --baseline or set it in the config")
    host, port = parse_listen(args.listen or cfg.listen)
    app = create_app(cfg, bl.load(baseline_path))
    uvicorn.run(app, host=host, port=port, log_level="info")
    return EXIT_OK


def cmd_replay(args) -> int:
    from .service.runtime import build_engine, build_sinks, replay

    cfg = _service_config(args.config)
    baseline = bl.load(args.baseline)
    engine = build_engine(cfg, baseline, event_time=True)
    stream = read_observations(args.input)
    sinks = build_sinks(cfg)
    with open(args.report, "w", newline="") as fh:
        result = replay(engine, stream, fh, sinks)
    print(json.dumps({"observations": result.observations, "evaluations": result.evaluations,
                      "reports": result.reports, "alerts": len(result.alerts)}))
    return EXIT_OK


def cmd_calibrate(args) -> int:
    cfg = _service_config(args.config)
    baseline = bl.load(args.baseline)
    scores = collect_scores(cfg.monitor.to_core(), baseline, read_observations(args.input))
    print(json.dumps(calibrate(scores, args.quantile, args.safety), sort_keys=True))
    return EXIT_OK


def cmd_simulate(args) -> int:
    params = {k: v for k, v in vars(args).items() if k in _SIM_PARAMS.get(args.scenario, ()) and v is not None}
    obs = simgen.generate(simgen.GenSpec(args.scenario, args.seed, params))
    with open(args.out, "w") as fh:
        n = write_ndjson(obs, fh)
    print(json.dumps({"scenario": args.scenario, "seed": args.seed, "observations": n, "out": args.out}))
    return EXIT_OK


def cmd_report(args) -> int:
    if args.figure == "throughput":
        result = experiments.ingest_throughput()
        Path(args.out).write_text(json.dumps(result, indent=1) + "\n")
        print(json.dumps(result))
        return EXIT_OK
    if args.figure == "figure4":
        rows, cols = experiments.figure4(), experiments.FIG4_COLUMNS
    else:
        rows, cols = experiments.figure5(), experiments.FIG5_COLUMNS
    with open(args.out, "w", newline="") as fh:
        experiments.write_rows(rows, cols, fh)
    print(json.dumps({"figure": args.figure, "rows": len(rows), "out": args.out}))
    return EXIT_OK


_COMMON = ("interval_ms", "start_ts")
_SIM_PARAMS = {
    "stationary": ("mu", "sigma2", "count", "feature") + _COMMON,
    "shift": ("mu1", "mu2", "sigma2", "t_shift", "count", "feature") + _COMMON,
    "seasonal": ("base", "amplitude", "noise_sigma", "days", "feature") + _COMMON,
    "stale": ("window_hours", "freeze_at", "count", "customers", "tracked_pages") + _COMMON,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="driftwatch", description="Feature drift monitoring against training baselines.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("baseline", help="build or export training baselines")
    bsub = b.add_subparsers(dest="action", required=True, parser_class=_Parser)
    bb = bsub.add_parser("build")
    bb.add_argument("--input", required=True, help="NDJSON or CSV training observations")
    bb.add_argument("--config", help="JSON build settings (or a service config with baseline_build)")
    bb.add_argument("--out", required=True, help="output .dwb file")
    bb.add_argument("--export-json", help="also write the plain-text JSON export")
    bb.set_defaults(func=cmd_baseline_build)
    be = bsub.add_parser("export")
    be.add_argument("--baseline", required=True)
    be.add_argument("--out", required=True)
    be.set_defaults(func=cmd_baseline_export)

    m = sub.add_parser("monitor", help="run the ingestion service")
    msub = m.add_subparsers(dest="action", required=True, parser_class=_Parser)
    mr = msub.add_parser("run")
    mr.add_argument("--config")
    mr.add_argument("--baseline")
    mr.add_argument("--listen", help="host:port")
    mr.set_defaults(func=cmd_monitor_run)

    r = sub.add_parser("replay", help="offline event-time run of a recorded stream")
    r.add_argument("--input", required=True)
    r.add_argument("--baseline", required=True)
    r.add_argument("--config")
    r.add_argument("--report", required=True, help="output report CSV")
    r.set_defaults(func=cmd_replay)

    s = sub.add_parser("simulate", help="write a synthetic observation stream")
    s.add_argument("scenario", choices=sorted(_SIM_PARAMS))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    for name, typ in (("count", int), ("mu", float), ("sigma2", float), ("mu1", float), ("mu2", float),
                      ("t_shift", int), ("base", float), ("amplitude", float), ("noise_sigma", float),
                      ("days", int), ("window_hours", int), ("freeze_at", int), ("customers", int),
                      ("interval_ms", int), ("start_ts", int), ("tracked_pages", float), ("feature", str)):
        s.add_argument("--" + name.replace("_", "-"), dest=name, type=typ)
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("calibrate", help="derive per-feature thresholds from a drift-free stream")
    c.add_argument("--input", required=True)
    c.add_argument("--baseline", required=True)
    c.add_argument("--config")
    c.add_argument("--quantile", type=float, default=0.999)
    c.add_argument("--safety", type=float, default=1.1)
    c.set_defaults(func=cmd_calibrate)

    rp = sub.add_parser("report", help="regenerate experiment data as CSV")
    rp.add_argument("figure", choices=("figure4", "figure5", "throughput"))
    rp.add_argument("--out", required=True)
    rp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail(EXIT_USAGE, exc)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, exc)
    except _INPUT_ERRORS as exc:
        return _fail(EXIT_INPUT, exc)
    except (DriftwatchError, ValueError) as exc:
        return _fail(EXIT_INPUT, exc)
    except Exception as exc:
        return _fail(EXIT_BUG, exc)


if __name__ == "__main__":
    sys.exit(main())
