"""Self-contained SVG rendering of series panels and ROC curves."""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from .evaluate import RocCurve
from .frame import SeriesFrame

PANEL_W = 900
PANEL_H = 140
MARGIN_L = 60
MARGIN_R = 15
MARGIN_T = 24
GAP = 18


def _scale(v, lo, hi, out_lo, out_hi):
    if hi == lo:
        return (out_lo + out_hi) / 2.0
    return out_lo + (v - lo) * (out_hi - out_lo) / (hi - lo)


def _polyline_segments(xs, ys):
    """Split at missing values so gaps stay visible."""
    segments = []
    current = []
    for x, y in zip(xs, ys):
        if math.isnan(y):
            if len(current) > 1:
                segments.append(current)
            current = []
        else:
            current.append((x, y))
    if len(current) > 1:
        segments.append(current)
    return segments


def _event_runs(flags) -> list:
    runs = []
    start = None
    for i, f in enumerate(flags):
        if f and start is None:
            start = i
        elif not f and start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(flags)))
    return runs


def series_svg(frame: SeriesFrame, event_rows: Optional[Sequence[bool]] = None) -> str:
    """One panel per quality column; event rows shaded and marked in red."""
    names = frame.quality_columns or frame.column_names
    n = len(frame)
    flags = np.asarray(event_rows, dtype=bool) if event_rows is not None else np.zeros(n, dtype=bool)
    height = MARGIN_T + len(names) * (PANEL_H + GAP)
    width = MARGIN_L + PANEL_W + MARGIN_R
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">'
    ]
    for panel, name in enumerate(names):
        top = MARGIN_T + panel * (PANEL_H + GAP)
        bottom = top + PANEL_H
        values = frame.values(name)
        observed = values[~np.isnan(values)]
        lo = float(observed.min()) if len(observed) else 0.0
        hi = float(observed.max()) if len(observed) else 1.0
        parts.append(
            f'<rect x="{MARGIN_L}" y="{top}" width="{PANEL_W}" height="{PANEL_H}" '
            'fill="white" stroke="#ccc"/>'
        )
        parts.append(f'<text x="{MARGIN_L}" y="{top - 6}" fill="#333">{name}</text>')
        parts.append(
            f'<text x="{MARGIN_L - 6}" y="{top + 10}" text-anchor="end" fill="#666">{hi:.4g}</text>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 6}" y="{bottom}" text-anchor="end" fill="#666">{lo:.4g}</text>'
        )
        for run_start, run_end in _event_runs(flags):
            x0 = _scale(run_start, 0, max(n - 1, 1), MARGIN_L, MARGIN_L + PANEL_W)
            x1 = _scale(run_end - 1, 0, max(n - 1, 1), MARGIN_L, MARGIN_L + PANEL_W)
            parts.append(
                f'<rect x="{x0:.2f}" y="{top}" width="{max(x1 - x0, 1.0):.2f}" height="{PANEL_H}" '
                'fill="red" fill-opacity="0.15"/>'
            )
        xs = [_scale(i, 0, max(n - 1, 1), MARGIN_L, MARGIN_L + PANEL_W) for i in range(n)]
        ys = [
            _scale(v, lo, hi, bottom - 4, top + 4) if not math.isnan(v) else math.nan for v in values
        ]
        for segment in _polyline_segments(xs, ys):
            coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in segment)
            parts.append(f'<polyline points="{coords}" fill="none" stroke="#1f77b4" stroke-width="1"/>')
        for i in np.flatnonzero(flags):
            if not math.isnan(ys[i]):
                parts.append(f'<circle cx="{xs[i]:.2f}" cy="{ys[i]:.2f}" r="1.6" fill="red"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def roc_svg(curve: RocCurve) -> str:
    """Single ROC panel with the random-guess diagonal for reference."""
    size = 420
    pad = 55
    plot = size - 2 * pad
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}" font-family="sans-serif" font-size="12">',
        f'<rect x="{pad}" y="{pad}" width="{plot}" height="{plot}" fill="white" stroke="#333"/>',
        f'<line x1="{pad}" y1="{size - pad}" x2="{size - pad}" y2="{pad}" '
        'stroke="#999" stroke-dasharray="5,4"/>',
        f'<text x="{size / 2}" y="{size - 12}" text-anchor="middle">False Positive Rate</text>',
        f'<text x="14" y="{size / 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {size / 2})">True Positive Rate</text>',
    ]
    for frac in (0.0, 0.5, 1.0):
        x = pad + frac * plot
        y = size - pad + 14
        parts.append(f'<text x="{x}" y="{y}" text-anchor="middle" fill="#666">{frac:g}</text>')
        parts.append(
            f'<text x="{pad - 8}" y="{size - pad - frac * plot + 4}" text-anchor="end" '
            f'fill="#666">{frac:g}</text>'
        )
    if curve.points:
        coords = " ".join(
            f"{pad + fpr * plot:.2f},{size - pad - tpr * plot:.2f}" for _, fpr, tpr in curve.points
        )
        parts.append(f'<polyline points="{coords}" fill="none" stroke="#d62728" stroke-width="2"/>')
    label = "AUC undefined" if curve.auc is None else f"AUC = {curve.auc:.4f}"
    parts.append(f'<text x="{size - pad - 6}" y="{size - pad - 10}" text-anchor="end">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
