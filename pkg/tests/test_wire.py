import io
import math

import pytest

from driftwatch.distribution import Observation
from driftwatch.wire import LineError, iter_csv, iter_ndjson, observation_line, parse_line, read_observations


def test_parse_valid_line():
    o = parse_line('{"ts": 1700000000000, "features": {"order_total": 101.5, "basket_size": 3}}')
    assert o.ts == 1700000000000
    assert o.values == {"order_total": 101.5, "basket_size": 3.0}


def test_null_reading_is_missing():
    o = parse_line('{"ts": 1, "features": {"a": null}}')
    assert math.isnan(o.values["a"])


@pytest.mark.parametrize("text", [
    "not json",
    '{"ts": -1, "features": {"a": 1}}',
    '{"ts": 1.5, "features": {"a": 1}}',
    '{"ts": "1", "features": {"a": 1}}',
    '{"ts": 1, "features": {}}',
    '{"ts": 1, "features": {"a": "1.0"}}',
    '{"ts": 1, "features": {"a": 1}, "extra": 0}',
    '{"features": {"a": 1}}',
])
def test_malformed_lines_rejected(text):
    with pytest.raises(LineError) as info:
        parse_line(text, 7)
    assert info.value.line == 7


def test_ndjson_roundtrip_and_blank_lines(tmp_path):
    obs = [Observation(0, {"a": 1.25}), Observation(5, {"a": math.nan, "b": -3.0})]
    text = "\n".join(observation_line(o) for o in obs) + "\n\n"
    back = list(iter_ndjson(io.StringIO(text)))
    assert back[0] == obs[0]
    assert back[1].ts == 5 and math.isnan(back[1].values["a"]) and back[1].values["b"] == -3.0
    p = tmp_path / "x.ndjson"
    p.write_text(text)
    assert len(read_observations(p)) == 2


def test_ndjson_reports_line_number():
    with pytest.raises(LineError) as info:
        list(iter_ndjson(io.StringIO('{"ts": 1, "features": {"a": 1}}\n\nbroken\n')))
    assert info.value.line == 3


def test_csv_input(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("ts,a,b\n0,1.5,2\n1000,,3\n")
    obs = read_observations(p)
    assert obs[0] == Observation(0, {"a": 1.5, "b": 2.0})
    assert math.isnan(obs[1].values["a"])


def test_csv_needs_ts_column():
    with pytest.raises(LineError):
        list(iter_csv(io.StringIO("a,b\n1,2\n")))
    with pytest.raises(LineError) as info:
        list(iter_csv(io.StringIO("ts,a\n0,1\nx,2\n")))
    assert info.value.line == 3
