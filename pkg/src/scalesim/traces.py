"""Workload trace ingestion and core-demand derivation.

A trace is a CSV table with header ``timestamp,instance_type,utilization``
sampled on a fixed grid (60 s by default). Utilization percentages are
converted to a demand series in cores by scaling with the vCPU count of the
observed instance type.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

from .errors import (
    EmptyTraceError,
    GridGapError,
    MalformedRowError,
    SplitOutOfRangeError,
    UnknownInstanceTypeError,
)

TRACE_COLUMNS = ("timestamp", "instance_type", "utilization")
DEFAULT_STEP = 60

FILL_ERROR = "error"
FILL_PREVIOUS = "previous-value"
FILL_LINEAR = "linear"
FILL_POLICIES = (FILL_ERROR, FILL_PREVIOUS, FILL_LINEAR)


@dataclass(frozen=True)
class TracePoint:
    """One observation: epoch second, instance type, CPU utilization in %."""

    timestamp: int
    instance_type: str
    utilization: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.utilization <= 100.0:
            raise MalformedRowError(
                f"utilization {self.utilization} outside [0, 100]"
            )


@dataclass(frozen=True)
class InstanceCatalog:
    """Maps instance type names to their vCPU counts.

    ``default_vcpus`` applies to unlisted types; leaving it ``None`` makes an
    unlisted type a hard error.
    """

    vcpus_by_type: Mapping[str, int]
    default_vcpus: int | None = None

    def vcpus(self, instance_type: str) -> int:
        count = self.vcpus_by_type.get(instance_type, self.default_vcpus)
        if count is None:
            raise UnknownInstanceTypeError(
                f"instance type {instance_type!r} not in catalog and no "
                "default vCPU count configured"
            )
        if count <= 0:
            raise UnknownInstanceTypeError(
                f"instance type {instance_type!r} has non-positive vCPUs"
            )
        return count

    @classmethod
    def load(cls, path: str | Path, default_vcpus: int | None = None) -> "InstanceCatalog":
        """Read a ``type = vcpus`` (or ``type,vcpus`` / JSON object) file."""
        text = Path(path).read_text(encoding="utf-8").strip()
        mapping: dict[str, int] = {}
        if text.startswith("{"):
            import json

            raw = json.loads(text)
            mapping = {str(k): int(v) for k, v in raw.items()}
        else:
            for line in text.splitlines():
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                sep = "=" if "=" in line else ","
                key, _, value = line.partition(sep)
                mapping[key.strip()] = int(value.strip())
        return cls(vcpus_by_type=mapping, default_vcpus=default_vcpus)


@dataclass(frozen=True)
class DemandSeries:
    """CPU demand in cores on a fixed time grid."""

    start_timestamp: int
    step: int
    demand: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.step <= 0:
            raise ValueError("step must be positive")
        if len(self.demand) < 1:
            raise ValueError("demand series must hold at least one value")
        if any(v < 0 for v in self.demand):
            raise ValueError("demand values must be non-negative")

    def __len__(self) -> int:
        return len(self.demand)

    def timestamp_at(self, index: int) -> int:
        return self.start_timestamp + index * self.step

    @property
    def end_timestamp(self) -> int:
        return self.timestamp_at(len(self.demand) - 1)

    def dump_csv(self, sink: IO[str] | str | Path) -> None:
        """Write ``timestamp,demand_cores`` rows; floats keep full precision."""
        close = False
        if isinstance(sink, (str, Path)):
            sink = open(sink, "w", encoding="utf-8", newline="")
            close = True
        try:
            sink.write("timestamp,demand_cores\n")
            for i, value in enumerate(self.demand):
                sink.write(f"{self.timestamp_at(i)},{value!r}\n")
        finally:
            if close:
                sink.close()

    @classmethod
    def load_csv(cls, source: IO[str] | str | Path) -> "DemandSeries":
        close = False
        if isinstance(source, (str, Path)):
            source = open(source, "r", encoding="utf-8", newline="")
            close = True
        try:
            reader = csv.reader(source)
            header = next(reader, None)
            if header is None:
                raise EmptyTraceError("empty demand series file")
            rows = [(int(ts), float(value)) for ts, value in reader]
        finally:
            if close:
                source.close()
        if not rows:
            raise EmptyTraceError("demand series file has no rows")
        start = rows[0][0]
        step = rows[1][0] - start if len(rows) > 1 else DEFAULT_STEP
        return cls(start, step, tuple(v for _, v in rows))


def parse_timestamp(raw: str) -> int:
    """Accept integer epoch seconds or an RFC-3339 string (UTC assumed)."""
    raw = raw.strip()
    try:
        return int(raw)
    except ValueError:
        pass
    text = raw[:-1] + "+00:00" if raw.endswith(("Z", "z")) else raw
    try:
        moment = datetime.fromisoformat(text)
    except ValueError as exc:
        raise MalformedRowError(f"unparseable timestamp {raw!r}") from exc
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    return int(moment.timestamp())


def parse_trace(
    source: IO[bytes] | IO[str] | str | Path, format: str = "csv"
) -> list[TracePoint]:
    """Parse a header-bearing delimited trace into TracePoints, in file order.

    Raises MalformedRowError on a bad number, a missing column, or an
    out-of-range utilization, and EmptyTraceError when no data rows exist.
    """
    if format != "csv":
        raise ValueError(f"unsupported trace format {format!r}")
    close = False
    if isinstance(source, (str, Path)):
        source = open(source, "r", encoding="utf-8", newline="")
        close = True
    try:
        if hasattr(source, "mode") and "b" in getattr(source, "mode", ""):
            source = io.TextIOWrapper(source, encoding="utf-8")
        elif isinstance(source, io.BufferedIOBase) or (
            hasattr(source, "read") and isinstance(source.read(0), bytes)
        ):
            source = io.TextIOWrapper(source, encoding="utf-8")
        reader = csv.DictReader(source)
        if reader.fieldnames is None:
            raise EmptyTraceError("trace has no header row")
        missing = [c for c in TRACE_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise MalformedRowError(f"trace header missing columns {missing}")
        points: list[TracePoint] = []
        for line_no, row in enumerate(reader, start=2):
            try:
                raw_ts = row["timestamp"]
                raw_type = row["instance_type"]
                raw_util = row["utilization"]
                if raw_ts is None or raw_type is None or raw_util is None:
                    raise MalformedRowError("missing column value")
                points.append(
                    TracePoint(
                        timestamp=parse_timestamp(raw_ts),
                        instance_type=raw_type.strip(),
                        utilization=float(raw_util),
                    )
                )
            except MalformedRowError as exc:
                raise MalformedRowError(f"line {line_no}: {exc}") from None
            except (TypeError, ValueError, KeyError) as exc:
                raise MalformedRowError(f"line {line_no}: {exc}") from None
        if not points:
            raise EmptyTraceError("trace contains a header but no rows")
        return points
    finally:
        if close:
            source.close()


def write_trace_csv(points: Iterable[TracePoint], sink: IO[str] | str | Path) -> None:
    close = False
    if isinstance(sink, (str, Path)):
        sink = open(sink, "w", encoding="utf-8", newline="")
        close = True
    try:
        sink.write(",".join(TRACE_COLUMNS) + "\n")
        for p in points:
            sink.write(f"{p.timestamp},{p.instance_type},{p.utilization!r}\n")
    finally:
        if close:
            sink.close()


def normalize_grid(
    points: Sequence[TracePoint], step: int = DEFAULT_STEP, fill: str = FILL_PREVIOUS
) -> list[TracePoint]:
    """Force the trace onto a fixed grid anchored at the first timestamp.

    Off-grid timestamps snap to the nearest slot, duplicates collapse to the
    arithmetic mean of their utilizations, and gaps are handled per ``fill``:
    ``error`` raises GridGapError, ``previous-value`` repeats the last seen
    observation, ``linear`` interpolates utilization between neighbours.
    """
    if fill not in FILL_POLICIES:
        raise ValueError(f"fill must be one of {FILL_POLICIES}, got {fill!r}")
    if not points:
        raise EmptyTraceError("cannot normalize an empty trace")
    if step <= 0:
        raise ValueError("step must be positive")
    ordered = sorted(points, key=lambda p: p.timestamp)
    start = ordered[0].timestamp

    slots: dict[int, list[TracePoint]] = {}
    for p in ordered:
        idx = round((p.timestamp - start) / step)
        slots.setdefault(idx, []).append(p)

    observed: dict[int, TracePoint] = {}
    for idx, bucket in slots.items():
        util = sum(p.utilization for p in bucket) / len(bucket)
        observed[idx] = TracePoint(start + idx * step, bucket[0].instance_type, util)

    last_idx = max(observed)
    known = sorted(observed)
    result: list[TracePoint] = []
    for idx in range(last_idx + 1):
        if idx in observed:
            result.append(observed[idx])
            continue
        if fill == FILL_ERROR:
            raise GridGapError(
                f"missing observation at t={start + idx * step} (step {step})"
            )
        prev = result[-1]
        if fill == FILL_PREVIOUS:
            result.append(TracePoint(start + idx * step, prev.instance_type, prev.utilization))
        else:  # linear
            nxt_idx = next(k for k in known if k > idx)
            nxt = observed[nxt_idx]
            prev_idx = idx - 1
            frac = (idx - prev_idx) / (nxt_idx - prev_idx)
            util = prev.utilization + frac * (nxt.utilization - prev.utilization)
            result.append(TracePoint(start + idx * step, prev.instance_type, util))
    return result


def to_demand_series(
    points: Sequence[TracePoint],
    catalog: InstanceCatalog,
    step: int = DEFAULT_STEP,
) -> DemandSeries:
    """Convert grid-aligned utilization observations to demand in cores.

    demand[i] = utilization_i * vcpus(instance_type_i) / 100. The points must
    already form a contiguous grid (one observation per step).
    """
    if not points:
        raise EmptyTraceError("cannot build a demand series from no points")
    start = points[0].timestamp
    demand = []
    for i, p in enumerate(points):
        expected = start + i * step
        if p.timestamp != expected:
            raise GridGapError(
                f"expected observation at t={expected}, found t={p.timestamp}; "
                "run normalize_grid first"
            )
        demand.append(p.utilization * catalog.vcpus(p.instance_type) / 100.0)
    return DemandSeries(start_timestamp=start, step=step, demand=tuple(demand))


def split_train_predict(
    series: DemandSeries, split_timestamp: int
) -> tuple[DemandSeries, DemandSeries]:
    """Partition at a timestamp: [start, split) goes to train, the rest to predict."""
    offset = split_timestamp - series.start_timestamp
    index = -(-offset // series.step)  # ceil for off-grid split points
    if index < 1 or index > len(series) - 1:
        raise SplitOutOfRangeError(
            f"split at {split_timestamp} leaves an empty partition "
            f"(series spans [{series.start_timestamp}, {series.end_timestamp}])"
        )
    train = DemandSeries(series.start_timestamp, series.step, series.demand[:index])
    predict = DemandSeries(
        series.timestamp_at(index), series.step, series.demand[index:]
    )
    return train, predict


def load_demand(
    trace_path: str | Path,
    catalog: InstanceCatalog,
    step: int = DEFAULT_STEP,
    fill: str = FILL_PREVIOUS,
) -> DemandSeries:
    """Parse, grid-normalize and convert a trace file in one call."""
    points = parse_trace(trace_path)
    points = normalize_grid(points, step=step, fill=fill)
    return to_demand_series(points, catalog, step=step)
