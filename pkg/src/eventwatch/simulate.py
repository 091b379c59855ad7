"""Synthetic event injection for validation runs.

Events are additive offsets over a row interval of chosen columns; the
returned frame carries ground-truth labels on exactly the injected rows.
Injection is reversible: subtracting the analytic offset restores the
original values bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, DataError
from .frame import SeriesFrame

SHAPE_SQUARE = "Square"
SHAPE_RAMP = "Ramp"
SHAPE_SINUSOIDAL = "Sinusoidal"
SHAPE_SLOW_SINUSOIDAL = "SlowSinusoidal"
SHAPES = (SHAPE_SQUARE, SHAPE_RAMP, SHAPE_SINUSOIDAL, SHAPE_SLOW_SINUSOIDAL)

_SHAPE_ALIASES = {s.lower(): s for s in SHAPES}
_SHAPE_ALIASES["slow-sinusoidal"] = SHAPE_SLOW_SINUSOIDAL
_SHAPE_ALIASES["slow_sinusoidal"] = SHAPE_SLOW_SINUSOIDAL


def resolve_shape(name: str) -> str:
    key = str(name).lower()
    if key not in _SHAPE_ALIASES:
        raise ConfigError(f"unknown event shape {name!r}; choose from {SHAPES}")
    return _SHAPE_ALIASES[key]


@dataclass(frozen=True)
class EventSpec:
    """One synthetic event: shape, target columns, position, magnitude."""

    shape: str
    columns: tuple
    start: int
    duration: int
    strength: float
    period: Optional[int] = None

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ConfigError(f"unknown event shape {self.shape!r}; choose from {SHAPES}")
        object.__setattr__(self, "columns", tuple(self.columns))
        if not self.columns:
            raise ConfigError("event must target at least one column")
        if self.duration < 1:
            raise ConfigError("event duration must be >= 1")
        if self.start < 0:
            raise ConfigError("event start must be >= 0")
        if self.period is not None and self.period < 1:
            raise ConfigError("event period must be >= 1")

    def offsets(self) -> np.ndarray:
        """Additive offset per row of [start, start+duration)."""
        d = self.duration
        t = np.arange(d, dtype=np.float64)
        if self.shape == SHAPE_SQUARE:
            return np.full(d, self.strength)
        if self.shape == SHAPE_RAMP:
            if d == 1:
                return np.array([self.strength])
            return self.strength * t / (d - 1)
        period = self.period
        if period is None:
            period = max(2, d // 5) if self.shape == SHAPE_SINUSOIDAL else d
        return self.strength * np.sin(2.0 * math.pi * t / period)


def inject_events(frame: SeriesFrame, specs: Sequence[EventSpec], seed: Optional[int] = None) -> SeriesFrame:
    """Superimpose the events on a copy of the frame and label their rows.

    Existing labels are kept and extended.  Two events may not overlap on
    the same column; the superposition order would be ambiguous.  The seed
    is reserved for future stochastic shapes; current shapes ignore it.
    """
    del seed
    n = len(frame)
    claimed = {name: np.zeros(n, dtype=bool) for name in frame.column_names}
    for spec in specs:
        if spec.start + spec.duration > n:
            raise DataError(
                f"event [{spec.start}, {spec.start + spec.duration}) exceeds frame length {n}"
            )
        for name in spec.columns:
            if name not in frame.columns:
                raise DataError(f"unknown event target column {name!r}")
            span = claimed[name][spec.start : spec.start + spec.duration]
            if span.any():
                raise DataError(f"overlapping events on column {name!r}")
            span[:] = True

    columns = {name: np.array(frame.columns[name]) for name in frame.column_names}
    labels = (
        np.array(frame.event_labels) if frame.event_labels is not None else np.zeros(n, dtype=bool)
    )
    for spec in specs:
        offsets = spec.offsets()
        rows = slice(spec.start, spec.start + spec.duration)
        for name in spec.columns:
            columns[name][rows] = columns[name][rows] + offsets
        labels[rows] = True
    return SeriesFrame(frame.timestamps, columns, dict(frame.column_roles), labels, frame.time_name)
