"""Training baselines: global and time-of-day references per feature.

Binary ``.dwb`` layout (all integers little-endian)::

    0   4 bytes   magic b"DWB\\x00"
    4   uint32    format_version
    8   uint64    header length H
    16  H bytes   UTF-8 JSON header: {"meta": {...}, "arrays": [{"feature", "key", "count"}, ...]}
    ..  float64   sample arrays, little-endian, in header order, each sorted ascending
    -8  uint64    checksum: blake2b(digest_size=8) of every preceding byte

``key`` is ``"global"`` or an integer time-of-day bucket. The JSON export
(:func:`export_json`) carries the same header and arrays as one document.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from . import rng
from .distribution import EmpiricalSample, Observation, subsample
from .errors import BadBucketWidth, CorruptFile, EmptyTraining, FormatVersionMismatch, UnknownFeature

log = logging.getLogger(__name__)

MINUTES_PER_DAY = 1440
MS_PER_MINUTE = 60_000
DEFAULT_SAMPLE_CAP = 10_000
DEFAULT_BUCKET_MINUTES = 60
DEFAULT_SPARSITY_FLOOR = 100

FORMAT_VERSION = 1
MAGIC = b"DWB\x00"
_PREFIX = struct.Struct("<4sIQ")


def _check_width(bucket_minutes: int) -> int:
    if isinstance(bucket_minutes, bool) or not isinstance(bucket_minutes, int):
        raise BadBucketWidth(f"bucket width must be an integer, got {bucket_minutes!r}")
    if bucket_minutes < 1 or MINUTES_PER_DAY % bucket_minutes:
        raise BadBucketWidth(f"{bucket_minutes} does not divide 1440 minutes")
    return MINUTES_PER_DAY // bucket_minutes


def bucket_of(ts: int, bucket_minutes: int) -> int:
    """Time-of-day bucket (UTC) containing the unix-ms timestamp ``ts``."""
    _check_width(bucket_minutes)
    minute = (int(ts) // MS_PER_MINUTE) % MINUTES_PER_DAY
    return minute // bucket_minutes


def buckets_of(ts: np.ndarray, bucket_minutes: int) -> np.ndarray:
    _check_width(bucket_minutes)
    return ((ts // MS_PER_MINUTE) % MINUTES_PER_DAY) // bucket_minutes


@dataclass(frozen=True)
class BuildConfig:
    bucket_minutes: int = DEFAULT_BUCKET_MINUTES
    sample_cap: int = DEFAULT_SAMPLE_CAP
    seed: int = 0
    seasonal: bool = False
    sparsity_floor: int = DEFAULT_SPARSITY_FLOOR

    def __post_init__(self):
        _check_width(self.bucket_minutes)
        if self.sample_cap < 1:
            raise ValueError("sample_cap must be >= 1")

    @classmethod
    def from_dict(cls, d: Mapping) -> "BuildConfig":
        known = {k: d[k] for k in ("bucket_minutes", "sample_cap", "seed", "seasonal", "sparsity_floor") if k in d}
        return cls(**known)


@dataclass
class FeatureBaseline:
    global_sample: EmpiricalSample
    seasonal: dict[int, EmpiricalSample] = field(default_factory=dict)
    raw_count: int = 0
    bucket_raw_counts: dict[int, int] = field(default_factory=dict)


@dataclass
class BaselineSet:
    features: dict[str, FeatureBaseline]
    bucket_minutes: int
    sample_cap: int
    seed: int
    seasonal: bool
    sparsity_floor: int
    build_ts: int
    dropped_nonfinite: int = 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, BaselineSet):
            return NotImplemented
        return _header(self) == _header(other) and all(
            a.tobytes() == b.tobytes() for a, b in zip(_arrays(self), _arrays(other))
        )

    def feature_names(self) -> list[str]:
        return sorted(self.features)


class Lookup(NamedTuple):
    sample: EmpiricalSample
    kind: str  # "global" | "seasonal" | "fallback_global"
    bucket: int | None = None

    @property
    def label(self) -> str:
        return f"seasonal:{self.bucket}" if self.kind == "seasonal" else self.kind


def _stream_seed(seed: int, feature: str, slot: int) -> int:
    # slot 0 is the global sample, slot b + 1 is bucket b
    return rng.derive(seed, rng.fnv1a64(feature), slot)


def build_baseline(records: Iterable[Observation], cfg: BuildConfig | None = None) -> BaselineSet:
    cfg = cfg or BuildConfig()
    values: dict[str, list[float]] = {}
    stamps: dict[str, list[int]] = {}
    seen = 0
    last_ts = 0
    dropped = 0
    for obs in records:
        seen += 1
        last_ts = max(last_ts, obs.ts)
        for name, x in obs.values.items():
            try:
                x = float(x)
            except (TypeError, ValueError):
                dropped += 1
                continue
            if not math.isfinite(x):
                dropped += 1
                continue
            values.setdefault(name, []).append(x)
            stamps.setdefault(name, []).append(obs.ts)
    if seen == 0 or not values:
        raise EmptyTraining("training stream yielded no usable readings")

    features = {}
    for name in sorted(values):
        xs = np.asarray(values[name], dtype=np.float64)
        full = EmpiricalSample(np.sort(xs))
        fb = FeatureBaseline(
            global_sample=subsample(full, cfg.sample_cap, _stream_seed(cfg.seed, name, 0)),
            raw_count=int(xs.size),
        )
        if cfg.seasonal:
            buckets = buckets_of(np.asarray(stamps[name], dtype=np.int64), cfg.bucket_minutes)
            for b in np.unique(buckets).tolist():
                part = EmpiricalSample(np.sort(xs[buckets == b]))
                fb.bucket_raw_counts[b] = part.count
                fb.seasonal[b] = subsample(part, cfg.sample_cap, _stream_seed(cfg.seed, name, b + 1))
        features[name] = fb

    return BaselineSet(
        features=features,
        bucket_minutes=cfg.bucket_minutes,
        sample_cap=cfg.sample_cap,
        seed=cfg.seed & rng.MASK64,
        seasonal=cfg.seasonal,
        sparsity_floor=cfg.sparsity_floor,
        build_ts=last_ts,
        dropped_nonfinite=dropped,
    )


def lookup(b: BaselineSet, feature: str, ts: int, mode: str = "global") -> Lookup:
    fb = b.features.get(feature)
    if fb is None:
        raise UnknownFeature(feature)
    if mode == "global":
        return Lookup(fb.global_sample, "global")
    if mode != "seasonal":
        raise ValueError(f"unknown baseline mode {mode!r}")
    key = bucket_of(ts, b.bucket_minutes)
    sample = fb.seasonal.get(key)
    if sample is None or fb.bucket_raw_counts.get(key, 0) < b.sparsity_floor:
        log.warning("feature %s: bucket %d sparse or absent, using global baseline", feature, key)
        return Lookup(fb.global_sample, "fallback_global", key)
    return Lookup(sample, "seasonal", key)


# -- persistence -----------------------------------------------------------


def _meta(b: BaselineSet) -> dict:
    return {
        "bucket_minutes": b.bucket_minutes,
        "sample_cap": b.sample_cap,
        "seed": b.seed,
        "seasonal": b.seasonal,
        "sparsity_floor": b.sparsity_floor,
        "build_ts": b.build_ts,
        "dropped_nonfinite": b.dropped_nonfinite,
        "raw_counts": {
            name: {
                "global": fb.raw_count,
                "buckets": {str(k): v for k, v in sorted(fb.bucket_raw_counts.items())},
            }
            for name, fb in sorted(b.features.items())
        },
    }


def _entries(b: BaselineSet) -> list[tuple[str, str | int, EmpiricalSample]]:
    out = []
    for name in sorted(b.features):
        fb = b.features[name]
        out.append((name, "global", fb.global_sample))
        for key in sorted(fb.seasonal):
            out.append((name, key, fb.seasonal[key]))
    return out


def _header(b: BaselineSet) -> dict:
    return {
        "meta": _meta(b),
        "arrays": [{"feature": f, "key": k, "count": s.count} for f, k, s in _entries(b)],
    }


def _arrays(b: BaselineSet) -> list[np.ndarray]:
    return [s.values for _, _, s in _entries(b)]


def _assemble(header: dict, arrays: list[np.ndarray]) -> BaselineSet:
    meta = header["meta"]
    raw_counts = meta["raw_counts"]
    features: dict[str, FeatureBaseline] = {}
    for entry, arr in zip(header["arrays"], arrays):
        name, key = entry["feature"], entry["key"]
        sample = EmpiricalSample(arr)
        if key == "global":
            counts = raw_counts[name]
            features[name] = FeatureBaseline(
                global_sample=sample,
                raw_count=int(counts["global"]),
                bucket_raw_counts={int(k): int(v) for k, v in counts["buckets"].items()},
            )
        else:
            features[name].seasonal[int(key)] = sample
    return BaselineSet(
        features=features,
        bucket_minutes=int(meta["bucket_minutes"]),
        sample_cap=int(meta["sample_cap"]),
        seed=int(meta["seed"]),
        seasonal=bool(meta["seasonal"]),
        sparsity_floor=int(meta["sparsity_floor"]),
        build_ts=int(meta["build_ts"]),
        dropped_nonfinite=int(meta.get("dropped_nonfinite", 0)),
    )


def _checksum(data: bytes) -> bytes:
    return hashlib.blake2b(data, digest_size=8).digest()


def dumps(b: BaselineSet, format_version: int = FORMAT_VERSION) -> bytes:
    header = json.dumps(_header(b), sort_keys=True, separators=(",", ":")).encode("utf-8")
    parts = [_PREFIX.pack(MAGIC, format_version, len(header)), header]
    parts.extend(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in _arrays(b))
    body = b"".join(parts)
    return body + _checksum(body)


def loads(data: bytes) -> BaselineSet:
    if len(data) < _PREFIX.size + 8:
        raise CorruptFile("file too short for a baseline container")
    magic, version, hlen = _PREFIX.unpack_from(data, 0)
    if magic != MAGIC:
        raise CorruptFile("not a driftwatch baseline file")
    if version != FORMAT_VERSION:
        raise FormatVersionMismatch(f"file format version {version}, this build reads {FORMAT_VERSION}")
    body, tail = data[:-8], data[-8:]
    if _checksum(body) != tail:
        raise CorruptFile("checksum mismatch")
    try:
        header = json.loads(body[_PREFIX.size : _PREFIX.size + hlen].decode("utf-8"))
        offset = _PREFIX.size + hlen
        arrays = []
        for entry in header["arrays"]:
            n = int(entry["count"])
            arr = np.frombuffer(body, dtype="<f8", count=n, offset=offset).astype(np.float64)
            offset += 8 * n
            arrays.append(arr)
        if offset != len(body):
            raise CorruptFile("trailing bytes after sample arrays")
        return _assemble(header, arrays)
    except (KeyError, ValueError, TypeError) as exc:
        raise CorruptFile(f"malformed baseline container: {exc}") from exc


def save(b: BaselineSet, path) -> None:
    Path(path).write_bytes(dumps(b))


def load(path) -> BaselineSet:
    return loads(Path(path).read_bytes())


def to_json_doc(b: BaselineSet) -> dict:
    doc = {"format_version": FORMAT_VERSION, **_header(b)}
    for entry, arr in zip(doc["arrays"], _arrays(b)):
        entry["values"] = arr.tolist()
    return doc


def from_json_doc(doc: Mapping) -> BaselineSet:
    if doc.get("format_version") != FORMAT_VERSION:
        raise FormatVersionMismatch(f"JSON export version {doc.get('format_version')}")
    arrays = [np.asarray(e["values"], dtype=np.float64) for e in doc["arrays"]]
    return _assemble(doc, arrays)


def export_json(b: BaselineSet, path) -> None:
    Path(path).write_text(json.dumps(to_json_doc(b), sort_keys=True, indent=1) + "\n")
