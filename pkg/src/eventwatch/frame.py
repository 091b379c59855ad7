"""Column-oriented multivariate time series with CSV ingestion and emission.

A SeriesFrame holds one timestamp column (integers or datetimes), a set of
float64 value columns where NaN marks a missing cell, optional boolean
ground-truth event labels, and a role tag per column.  Frames are immutable
after construction; every consumer can share one safely.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime
from types import MappingProxyType
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import DataError

logger = logging.getLogger(__name__)

ROLE_QUALITY = "quality"
ROLE_OPERATIONAL = "operational"
ROLE_IGNORED = "ignored"
ROLES = (ROLE_QUALITY, ROLE_OPERATIONAL, ROLE_IGNORED)

TRUTHY_LABELS = ("1", "TRUE", "true")
FALSY_LABELS = ("0", "FALSE", "false")


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SeriesFrame:
    """Immutable multivariate series; NaN cells are missing values."""

    timestamps: tuple
    columns: Mapping[str, np.ndarray]
    column_roles: Mapping[str, str] = field(default_factory=dict)
    event_labels: Optional[np.ndarray] = None
    time_name: str = "Time"

    def __post_init__(self):
        n = len(self.timestamps)
        if n == 0:
            raise DataError("frame must contain at least one row")
        cols = {}
        for name, values in dict(self.columns).items():
            if not name:
                raise DataError("column names must be non-empty")
            arr = np.asarray(values, dtype=np.float64)
            if arr.shape != (n,):
                raise DataError(
                    f"column {name!r} has length {arr.shape[0] if arr.ndim == 1 else arr.shape}, expected {n}"
                )
            cols[name] = _readonly(arr)
        object.__setattr__(self, "timestamps", tuple(self.timestamps))
        object.__setattr__(self, "columns", MappingProxyType(cols))
        roles = {name: self.column_roles.get(name, ROLE_QUALITY) for name in cols}
        for name, role in roles.items():
            if role not in ROLES:
                raise DataError(f"unknown role {role!r} for column {name!r}")
        object.__setattr__(self, "column_roles", MappingProxyType(roles))
        if self.event_labels is not None:
            labels = np.asarray(self.event_labels, dtype=bool)
            if labels.shape != (n,):
                raise DataError("eventLabels length must match timestamps")
            object.__setattr__(self, "event_labels", _readonly(labels))
        for a, b in zip(self.timestamps, self.timestamps[1:]):
            try:
                ordered = a < b
            except TypeError:
                raise DataError("timestamps mix integers and datetimes") from None
            if not ordered:
                raise DataError(f"timestamps not strictly increasing at {b!r}")
        if n >= 3:
            diffs = {self._step(i) for i in range(1, n)}
            if len(diffs) > 1:
                logger.warning(
                    "timestamps are not uniformly spaced; the detector treats rows as equidistant"
                )

    def _step(self, i: int):
        a, b = self.timestamps[i - 1], self.timestamps[i]
        return b - a

    def __len__(self) -> int:
        return len(self.timestamps)

    @property
    def column_names(self) -> tuple:
        return tuple(self.columns.keys())

    @property
    def quality_columns(self) -> tuple:
        return tuple(n for n in self.columns if self.column_roles[n] == ROLE_QUALITY)

    def values(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise DataError(f"unknown column {name!r}")
        return self.columns[name]

    def with_labels(self, labels: Sequence[bool]) -> "SeriesFrame":
        return SeriesFrame(self.timestamps, dict(self.columns), dict(self.column_roles), labels, self.time_name)

    def with_roles(self, roles: Mapping[str, str]) -> "SeriesFrame":
        merged = dict(self.column_roles)
        for name, role in roles.items():
            if name not in self.columns:
                raise DataError(f"unknown column {name!r}")
            merged[name] = role
        return SeriesFrame(self.timestamps, dict(self.columns), merged, self.event_labels, self.time_name)

    def equals(self, other: "SeriesFrame") -> bool:
        """Exact equality; missing cells compare equal to missing cells."""
        if self.timestamps != other.timestamps or self.time_name != other.time_name:
            return False
        if self.column_names != other.column_names:
            return False
        for name in self.columns:
            a, b = self.columns[name], other.columns[name]
            if not np.array_equal(a, b, equal_nan=True):
                return False
        if (self.event_labels is None) != (other.event_labels is None):
            return False
        if self.event_labels is not None and not np.array_equal(self.event_labels, other.event_labels):
            return False
        return True


@dataclass(frozen=True)
class WindowView:
    """Half-open row range [start, end) over a frame."""

    frame: SeriesFrame
    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end <= len(self.frame)):
            raise DataError(
                f"window [{self.start}, {self.end}) out of range for frame of length {len(self.frame)}"
            )

    def __len__(self) -> int:
        return self.end - self.start

    def values(self, name: str) -> np.ndarray:
        return self.frame.values(name)[self.start : self.end]


def slice_window(frame: SeriesFrame, start: int, size: int) -> WindowView:
    if size <= 0:
        raise DataError("window size must be positive")
    return WindowView(frame, start, start + size)


def select_columns(frame: SeriesFrame, names: Sequence[str]) -> SeriesFrame:
    """Restrict the frame to the named value columns, keeping time and labels."""
    names = list(names)
    if not names:
        raise DataError("empty column selection")
    for name in names:
        if name not in frame.columns:
            raise DataError(f"unknown column {name!r}")
    cols = {name: frame.columns[name] for name in names}
    roles = {name: frame.column_roles[name] for name in names}
    return SeriesFrame(frame.timestamps, cols, roles, frame.event_labels, frame.time_name)


@dataclass(frozen=True)
class CsvOptions:
    time_column: object = 0  # header name or positional index
    label_column: str = "EVENT"


def _parse_time_cell(cell: str):
    cell = cell.strip()
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return datetime.fromisoformat(cell)
    except ValueError:
        raise DataError(f"time column unparseable at {cell!r}") from None


def _parse_value_cell(cell: str) -> float:
    cell = cell.strip()
    if not cell:
        return math.nan
    try:
        return float(cell)
    except ValueError:
        return math.nan


def _parse_label_cell(cell: str) -> bool:
    cell = cell.strip()
    if cell in TRUTHY_LABELS:
        return True
    if cell in FALSY_LABELS:
        return False
    raise DataError(f"event label cell {cell!r} is not one of {TRUTHY_LABELS + FALSY_LABELS}")


def parse_csv(text: str, options: CsvOptions = CsvOptions()) -> SeriesFrame:
    """Parse header-first CSV into a SeriesFrame.

    One column is the time axis (by name or position, default first).  A
    column named per options.label_column becomes the boolean ground
    truth.  Empty and non-numeric value cells become missing markers.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty CSV: missing header row") from None
    header = [h.strip() for h in header]
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise DataError(f"duplicate column names: {dupes}")
    if isinstance(options.time_column, int):
        if not (0 <= options.time_column < len(header)):
            raise DataError(f"time column index {options.time_column} out of range")
        time_name = header[options.time_column]
    else:
        if options.time_column not in header:
            raise DataError(f"time column {options.time_column!r} not in header")
        time_name = options.time_column
    time_idx = header.index(time_name)
    label_idx = header.index(options.label_column) if options.label_column in header else None

    value_names = [h for i, h in enumerate(header) if i != time_idx and i != label_idx]
    timestamps = []
    values = {name: [] for name in value_names}
    labels = [] if label_idx is not None else None
    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataError(f"row {len(timestamps) + 2} has {len(row)} fields, header has {len(header)}")
        timestamps.append(_parse_time_cell(row[time_idx]))
        if labels is not None:
            labels.append(_parse_label_cell(row[label_idx]))
        for i, h in enumerate(header):
            if i == time_idx or i == label_idx:
                continue
            values[h].append(_parse_value_cell(row[i]))
    if not timestamps:
        raise DataError("CSV contains zero data rows")
    return SeriesFrame(
        timestamps=tuple(timestamps),
        columns={name: np.array(vals, dtype=np.float64) for name, vals in values.items()},
        event_labels=labels,
        time_name=time_name,
    )


def format_value(v: float) -> str:
    """Render one cell: empty for missing, 17 significant digits otherwise."""
    if math.isnan(v):
        return ""
    return format(float(v), ".17g")


def format_timestamp(t) -> str:
    if isinstance(t, datetime):
        return t.isoformat(sep=" ")
    return str(t)


def emit_csv(frame: SeriesFrame, include_labels: bool = True) -> str:
    """Emit RFC-4180 CSV with LF line endings; parse_csv round-trips it."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header = [frame.time_name, *frame.column_names]
    with_labels = include_labels and frame.event_labels is not None
    if with_labels:
        header.append("EVENT")
    writer.writerow(header)
    for i, t in enumerate(frame.timestamps):
        row = [format_timestamp(t)]
        row.extend(format_value(frame.columns[name][i]) for name in frame.column_names)
        if with_labels:
            row.append("1" if frame.event_labels[i] else "0")
        writer.writerow(row)
    return out.getvalue()
