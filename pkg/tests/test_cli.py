import csv
import json

import pytest

from driftwatch.cli import main


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["simulate", "stationary", "--seed", "1", "--count", "10000", "--out", "train.ndjson"]) == 0
    assert main(["baseline", "build", "--input", "train.ndjson", "--out", "b.dwb"]) == 0
    cfg = {
        "monitor": {"features": ["order_total"], "window_n": 100, "eval_every": {"observations": 50}},
        "policy": {"threshold": 3.0},
        "sinks": [{"type": "log_file", "path": str(tmp_path / "alerts.jsonl")}],
    }
    (tmp_path / "svc.json").write_text(json.dumps(cfg))
    return tmp_path


def _stderr_json(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_replay_is_byte_identical(workdir):
    assert main(["simulate", "shift", "--seed", "2", "--out", "live.ndjson"]) == 0
    for name in ("r1.csv", "r2.csv"):
        assert main(["replay", "--input", "live.ndjson", "--baseline", "b.dwb", "--config", "svc.json",
                     "--report", name]) == 0
    assert (workdir / "r1.csv").read_bytes() == (workdir / "r2.csv").read_bytes()
    assert len((workdir / "alerts.jsonl").read_text().splitlines()) == 2  # one per replay


def test_calibrate_then_replay_one_alert(workdir, capsys):
    assert main(["simulate", "stationary", "--seed", "5", "--count", "20000", "--out", "calm.ndjson"]) == 0
    capsys.readouterr()
    assert main(["calibrate", "--input", "calm.ndjson", "--baseline", "b.dwb", "--config", "svc.json"]) == 0
    th = json.loads(capsys.readouterr().out)["order_total"]
    assert 0 < th < 10
    cfg = json.loads((workdir / "svc.json").read_text())
    cfg["policy"] = {"threshold": th}
    (workdir / "svc.json").write_text(json.dumps(cfg))
    assert main(["simulate", "shift", "--seed", "2", "--out", "live.ndjson"]) == 0
    assert main(["replay", "--input", "live.ndjson", "--baseline", "b.dwb", "--config", "svc.json",
                 "--report", "r.csv"]) == 0
    assert len((workdir / "alerts.jsonl").read_text().splitlines()) == 1


def test_config_from_env(workdir, monkeypatch):
    monkeypatch.setenv("DRIFTWATCH_CONFIG", str(workdir / "svc.json"))
    assert main(["simulate", "stationary", "--seed", "3", "--count", "500", "--out", "s.ndjson"]) == 0
    assert main(["replay", "--input", "s.ndjson", "--baseline", "b.dwb", "--report", "r.csv"]) == 0


def test_export_json(workdir):
    assert main(["baseline", "export", "--baseline", "b.dwb", "--out", "b.json"]) == 0
    doc = json.loads((workdir / "b.json").read_text())
    assert "order_total" in json.dumps(doc)


def test_exit_codes(workdir, capsys, monkeypatch):
    monkeypatch.delenv("DRIFTWATCH_CONFIG", raising=False)
    assert main(["replay", "--input", "x"]) == 1
    assert _stderr_json(capsys)["exit_code"] == 1
    assert main(["replay", "--input", "s.ndjson", "--baseline", "b.dwb", "--report", "r.csv"]) == 1
    assert main(["baseline", "build", "--input", "missing.ndjson", "--out", "o.dwb"]) == 2
    err = _stderr_json(capsys)
    assert err["exit_code"] == 2 and err["error"] == "FileNotFoundError"
    (workdir / "bad.dwb").write_bytes(b"nope")
    assert main(["baseline", "export", "--baseline", "bad.dwb", "--out", "o.json"]) == 2
    assert main(["simulate", "nosuch", "--out", "o"]) == 1


def test_report_figure4_ordering(workdir):
    assert main(["report", "figure4", "--out", "fig4.csv"]) == 0
    with open(workdir / "fig4.csv") as fh:
        rows = list(csv.DictReader(fh))
    keys = [(r["scenario"], int(r["n"])) for r in rows]
    assert [k for i, k in enumerate(keys) if i == 0 or keys[i - 1] != k] == [
        ("stationary", 10), ("stationary", 100), ("stationary", 1000),
        ("shift", 10), ("shift", 100), ("shift", 1000)]
    for k in set(keys):
        ts = [int(r["t"]) for r in rows if (r["scenario"], int(r["n"])) == k]
        assert ts == sorted(ts) and all(t % 50 == 0 for t in ts)
    stat = [r for r in rows if r["scenario"] == "stationary" and r["partial"] == "false"]
    mean = {n: sum(float(r["score"]) for r in stat if r["n"] == n) / sum(r["n"] == n for r in stat)
            for n in ("10", "1000")}
    assert mean["1000"] * 10 <= mean["10"]
