"""Observation wire formats: NDJSON wide records and a wide CSV variant.

One NDJSON line per request::

    {"ts": 1700000000000, "features": {"order_total": 101.5, "basket_size": 3}}

``null`` readings are accepted and treated as missing (counted as dropped by
the window, never scored). CSV input has a ``ts`` column plus one column per
feature; empty cells are missing readings.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import IO, Iterable, Iterator

from pydantic import BaseModel, ConfigDict, Field, StrictFloat, StrictInt, ValidationError

from .distribution import Observation


class ObservationIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    ts: StrictInt = Field(ge=0, description="event time, unix milliseconds")
    features: dict[str, StrictFloat | StrictInt | None] = Field(min_length=1)

    def to_observation(self) -> Observation:
        return Observation(self.ts, {k: (math.nan if v is None else float(v)) for k, v in self.features.items()})


class LineError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


def parse_line(text: str | bytes, line: int = 0) -> Observation:
    try:
        return ObservationIn.model_validate_json(text).to_observation()
    except ValidationError as exc:
        err = exc.errors()[0]
        where = ".".join(str(p) for p in err.get("loc", ()))
        raise LineError(line, f"{where}: {err['msg']}" if where else err["msg"]) from None


def iter_ndjson(fh: IO[str]) -> Iterator[Observation]:
    """Observations from an NDJSON stream; blank lines skipped, bad lines raise."""
    for i, text in enumerate(fh, start=1):
        if text.strip():
            yield parse_line(text, i)


def iter_csv(fh: IO[str]) -> Iterator[Observation]:
    reader = csv.DictReader(fh)
    if not reader.fieldnames or "ts" not in reader.fieldnames:
        raise LineError(1, "CSV input needs a 'ts' column")
    for i, row in enumerate(reader, start=2):
        try:
            ts = int(row.pop("ts"))
            values = {k: (float(v) if v not in ("", None) else math.nan) for k, v in row.items()}
            yield Observation(ts, values)
        except (TypeError, ValueError) as exc:
            raise LineError(i, str(exc)) from None


def read_observations(path) -> list[Observation]:
    path = Path(path)
    with path.open() as fh:
        if path.suffix.lower() == ".csv":
            return list(iter_csv(fh))
        return list(iter_ndjson(fh))


def observation_line(o: Observation) -> str:
    feats = {k: (None if not math.isfinite(v) else v) for k, v in o.values.items()}
    return json.dumps({"ts": o.ts, "features": feats}, separators=(",", ":"))


def write_ndjson(observations: Iterable[Observation], fh: IO[str]) -> int:
    n = 0
    for o in observations:
        fh.write(observation_line(o))
        fh.write("\n")
        n += 1
    return n
