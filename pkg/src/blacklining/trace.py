"""Timing traces: the raw request-timestamp observable, plus file I/O.

Two on-disk formats are supported:

* JSON Lines: a header record ``{"source_id", "label", "channel"}`` on the
  first line, then one ``{"ts_us": <int>}`` record per event.
* CSV: a single ``ts_us`` column with a header row. Labels travel in an
  optional sidecar file ``<name>.label`` holding the same header record as
  JSON; no sidecar means the trace is unlabeled.
"""

import csv
import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import OrderError, ParseError, TraceIOError

PathLike = Union[str, Path]


class Label(enum.Enum):
    NORMAL = "normal"
    ATTACK = "attack"


class ChannelKind(enum.Enum):
    CPU_LOAD = "cpu_load"
    MEMORY_BUS = "memory_bus"
    CACHE = "cache"

    @property
    def display_name(self):
        return {"cpu_load": "CPU load", "memory_bus": "Memory Bus", "cache": "Cache"}[self.value]


def _frozen(values, dtype):
    arr = np.array(values, dtype=dtype)
    if arr.ndim != 1:
        raise ValueError("expected a one-dimensional sequence")
    arr.setflags(write=False)
    return arr


class TimingTrace:
    """Ordered request timestamps in integer microseconds.

    Immutable: the timestamp array is read-only and the label cannot be
    reassigned. ``channel`` is only meaningful for attack-labeled traces.
    """

    __slots__ = ("_timestamps", "_source_id", "_label", "_channel")

    def __init__(self, timestamps, source_id="", label=None, channel=None):
        ts = _frozen(timestamps, np.int64)
        if ts.size and ts[0] < 0:
            raise OrderError("timestamps must be non-negative")
        if ts.size > 1:
            bad = np.flatnonzero(np.diff(ts) < 0)
            if bad.size:
                raise OrderError(f"timestamp decreases at index {bad[0] + 1}")
        if label is not None and not isinstance(label, Label):
            label = Label(label)
        if channel is not None and not isinstance(channel, ChannelKind):
            channel = ChannelKind(channel)
        if channel is not None and label is not Label.ATTACK:
            raise ValueError("channel kind is only valid on attack-labeled traces")
        object.__setattr__(self, "_timestamps", ts)
        object.__setattr__(self, "_source_id", str(source_id))
        object.__setattr__(self, "_label", label)
        object.__setattr__(self, "_channel", channel)

    def __setattr__(self, name, value):
        raise AttributeError("TimingTrace is immutable")

    @property
    def timestamps(self) -> np.ndarray:
        return self._timestamps

    @property
    def source_id(self) -> str:
        return self._source_id

    @property
    def label(self) -> Optional[Label]:
        return self._label

    @property
    def channel(self) -> Optional[ChannelKind]:
        return self._channel

    def __len__(self):
        return int(self._timestamps.size)

    def __eq__(self, other):
        if not isinstance(other, TimingTrace):
            return NotImplemented
        return (
            self._source_id == other._source_id
            and self._label is other._label
            and self._channel is other._channel
            and np.array_equal(self._timestamps, other._timestamps)
        )

    def __hash__(self):
        return hash((self._source_id, self._label, self._channel, self._timestamps.tobytes()))

    def __repr__(self):
        label = self._label.value if self._label else None
        return f"TimingTrace(n={len(self)}, source_id={self._source_id!r}, label={label!r})"

    def with_timestamps(self, timestamps):
        """Copy of this trace with new timestamps and the same metadata."""
        return TimingTrace(timestamps, self._source_id, self._label, self._channel)

    def header(self) -> dict:
        return {
            "source_id": self._source_id,
            "label": self._label.value if self._label else None,
            "channel": self._channel.value if self._channel else None,
        }


@dataclass(frozen=True)
class IntervalSeries:
    """First-order differences of a trace (inter-arrival gaps)."""

    values: np.ndarray

    def __post_init__(self):
        vals = _frozen(self.values, np.float64)
        if np.any(vals < 0):
            raise ValueError("interval values must be non-negative")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return int(self.values.size)


def _infer_format(path, fmt):
    if fmt is not None:
        fmt = fmt.lower()
        if fmt not in ("jsonl", "csv"):
            raise ValueError(f"unknown trace format {fmt!r}")
        return fmt
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix in (".jsonl", ".json", ".ndjson"):
        return "jsonl"
    raise ValueError(f"cannot infer trace format from {path!s}; pass format=")


def _parse_header(rec, line):
    if not isinstance(rec, dict):
        raise ParseError("header must be a JSON object", line)
    try:
        label = Label(rec["label"]) if rec.get("label") is not None else None
        channel = ChannelKind(rec["channel"]) if rec.get("channel") is not None else None
    except ValueError as exc:
        raise ParseError(str(exc), line) from None
    return str(rec.get("source_id", "")), label, channel


def _parse_ts(raw, line):
    if isinstance(raw, bool) or not isinstance(raw, (int, str)):
        if isinstance(raw, float) and raw.is_integer():
            raw = int(raw)
        else:
            raise ParseError(f"ts_us must be an integer, got {raw!r}", line)
    try:
        value = int(raw)
    except ValueError:
        raise ParseError(f"ts_us must be an integer, got {raw!r}", line) from None
    if value < 0:
        raise ParseError("ts_us must be non-negative", line)
    return value


def _check_order(values, lines):
    for i in range(1, len(values)):
        if values[i] < values[i - 1]:
            raise OrderError(f"timestamp {values[i]} follows {values[i - 1]}", lines[i])


def load_trace(path: PathLike, format: Optional[str] = None) -> TimingTrace:
    """Read and validate a trace. Out-of-order input is rejected, never sorted."""
    fmt = _infer_format(path, format)
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise TraceIOError(f"cannot read {path}: {exc}") from exc

    values, lines = [], []
    source_id, label, channel = path.stem, None, None

    if fmt == "jsonl":
        first = True
        for lineno, raw in enumerate(text.splitlines(), start=1):
            if not raw.strip():
                continue
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", lineno) from None
            if first:
                first = False
                if isinstance(rec, dict) and "ts_us" not in rec:
                    source_id, label, channel = _parse_header(rec, lineno)
                    continue
            if not isinstance(rec, dict) or "ts_us" not in rec:
                raise ParseError("expected an object with key 'ts_us'", lineno)
            values.append(_parse_ts(rec["ts_us"], lineno))
            lines.append(lineno)
    else:
        reader = csv.reader(text.splitlines())
        header_seen = False
        for lineno, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if not header_seen:
                if [c.strip() for c in row] != ["ts_us"]:
                    raise ParseError("CSV header must be the single column 'ts_us'", lineno)
                header_seen = True
                continue
            if len(row) != 1:
                raise ParseError(f"expected 1 column, got {len(row)}", lineno)
            values.append(_parse_ts(row[0].strip(), lineno))
            lines.append(lineno)
        if not header_seen:
            raise ParseError("missing CSV header 'ts_us'", 1)
        sidecar = _sidecar(path)
        if sidecar.exists():
            try:
                rec = json.loads(sidecar.read_text())
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid label sidecar {sidecar.name} ({exc.msg})", 1) from None
            source_id, label, channel = _parse_header(rec, 1)

    _check_order(values, lines)
    return TimingTrace(values, source_id=source_id, label=label, channel=channel)


def _sidecar(path):
    return path.with_name(path.name + ".label") if path.suffix == "" else path.with_suffix(".label")


def dumps_jsonl(trace: TimingTrace) -> str:
    """The exact JSON Lines text that :func:`save_trace` writes."""
    lines = [json.dumps(trace.header())]
    lines.extend(f'{{"ts_us": {t}}}' for t in trace.timestamps.tolist())
    return "\n".join(lines) + "\n"


def save_trace(trace: TimingTrace, path: PathLike, format: Optional[str] = None) -> None:
    fmt = _infer_format(path, format)
    path = Path(path)
    ts = trace.timestamps.tolist()
    try:
        if fmt == "jsonl":
            path.write_text(dumps_jsonl(trace))
        else:
            with path.open("w", newline="") as fh:
                fh.write("ts_us\n")
                for t in ts:
                    fh.write(f"{t}\n")
            _sidecar(path).write_text(json.dumps(trace.header()) + "\n")
    except OSError as exc:
        raise TraceIOError(f"cannot write {path}: {exc}") from exc
