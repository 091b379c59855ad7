"""Scoring of detection output against ground truth.

Metrics are pointwise over timesteps.  Ratios whose denominator is zero
are reported as None rather than raised; a run with no true events still
has a well-defined false positive rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise DataError("confusion matrix counts must be non-negative")

    @property
    def positives(self) -> int:
        return self.tp + self.fn

    @property
    def negatives(self) -> int:
        return self.fp + self.tn

    @property
    def total(self) -> int:
        return self.positives + self.negatives


@dataclass(frozen=True)
class RocCurve:
    points: tuple  # (threshold, fpr, tpr), fpr non-decreasing
    auc: Optional[float]


def _as_mask(mask, n: int) -> np.ndarray:
    if mask is None:
        return np.ones(n, dtype=bool)
    m = np.asarray(mask, dtype=bool)
    if m.shape != (n,):
        raise DataError("mask length must match the row count")
    return m


def confusion_matrix(predicted: Sequence[bool], actual: Sequence[bool], mask=None) -> ConfusionMatrix:
    pred = np.asarray(predicted, dtype=bool)
    act = np.asarray(actual, dtype=bool)
    if pred.shape != act.shape:
        raise DataError(f"predicted has {pred.shape[0]} rows, actual has {act.shape[0]}")
    m = _as_mask(mask, len(pred))
    if not m.any():
        raise DataError("empty evaluation mask")
    pred, act = pred[m], act[m]
    return ConfusionMatrix(
        tp=int(np.sum(pred & act)),
        fp=int(np.sum(pred & ~act)),
        fn=int(np.sum(~pred & act)),
        tn=int(np.sum(~pred & ~act)),
    )


def summary_stats(cm: ConfusionMatrix) -> dict:
    """accuracy, sensitivity, specificity, fpr; None where undefined."""
    p, n = cm.positives, cm.negatives
    accuracy = (cm.tp + cm.tn) / cm.total if cm.total else None
    sensitivity = cm.tp / p if p else None
    fpr = cm.fp / n if n else None
    specificity = 1.0 - fpr if fpr is not None else None
    return {
        "accuracy": accuracy,
        "sensitivity": sensitivity,
        "specificity": specificity,
        "fpr": fpr,
    }


def roc_curve(probabilities: Sequence[float], actual: Sequence[bool], mask=None) -> RocCurve:
    """Sweep the event threshold over the observed probabilities.

    Predicted is rho > threshold (strict, matching the detector), so the
    sweep starts at (0,0) for threshold 1 and is closed with a sentinel
    threshold of -1 that predicts everything, pinning (1,1).  Consecutive
    duplicate points collapse.  AUC is the trapezoidal area over FPR; it
    is None when only one class is present.
    """
    probs = np.asarray(probabilities, dtype=np.float64)
    act = np.asarray(actual, dtype=bool)
    if probs.shape != act.shape:
        raise DataError("probabilities and actual must have equal length")
    if np.isnan(probs).any() or probs.min() < 0.0 or probs.max() > 1.0:
        raise DataError("probabilities must lie in [0, 1]")
    m = _as_mask(mask, len(probs))
    probs, act = probs[m], act[m]
    p = int(act.sum())
    n = int(len(act) - p)
    if p == 0 or n == 0:
        return RocCurve(points=(), auc=None)

    thresholds = sorted({1.0, 0.0, *map(float, probs)}, reverse=True)
    thresholds.append(-1.0)
    points = []
    for thr in thresholds:
        pred = probs > thr
        tpr = float(np.sum(pred & act)) / p
        fpr = float(np.sum(pred & ~act)) / n
        if points and (fpr, tpr) == (points[-1][1], points[-1][2]):
            continue
        points.append((thr, fpr, tpr))
    auc = 0.0
    for (_, x0, y0), (_, x1, y1) in zip(points, points[1:]):
        auc += (x1 - x0) * (y0 + y1) / 2.0
    return RocCurve(points=tuple(points), auc=float(auc))


def metrics_report(cm: ConfusionMatrix) -> str:
    """Plain-text confusion matrix table plus the summary ratios."""
    stats = summary_stats(cm)
    w = max(len(str(v)) for v in (cm.tp, cm.fp, cm.fn, cm.tn))
    lines = [
        "                 actual event   actual normal",
        f"predicted event  {cm.tp:>{w + 11}}   {cm.fp:>{w + 11}}",
        f"predicted normal {cm.fn:>{w + 11}}   {cm.tn:>{w + 11}}",
        "",
    ]
    for key in ("accuracy", "sensitivity", "specificity", "fpr"):
        value = stats[key]
        lines.append(f"{key:12s} {'undefined' if value is None else format(value, '.4f')}")
    return "\n".join(lines) + "\n"


def roc_csv(curve: RocCurve) -> str:
    lines = ["threshold,fpr,tpr"]
    for thr, fpr, tpr in curve.points:
        lines.append(f"{format(thr, '.17g')},{format(fpr, '.17g')},{format(tpr, '.17g')}")
    return "\n".join(lines) + "\n"
