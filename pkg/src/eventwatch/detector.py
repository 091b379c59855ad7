"""Sliding-window event detection.

The loop trains a forecasting model on the most recent window, predicts the
next block of rows, and classifies each new observation by its residual: a
column is an outlier when |observed - predicted| exceeds tau, the column's
training residual spread times a configurable multiplier.  The outlier
verdicts feed a short boolean buffer whose outlier count is transformed by
the binomial CDF into an event probability rho; a row is an Event when rho
exceeds the event threshold.

Training-window hygiene: a model trained on rows that belong to an ongoing
event learns the event and stops seeing it.  To keep the baseline model
honest, a freshly flagged outlier is held out of training until the buffer
has ruled on it (bedWindowSize rows); once a row is labeled Event, the run
of flagged rows that produced it is excluded for good.  Isolated outliers
re-enter training, so the residual spread stays unbiased on clean data.
Eligible rows are drawn from the last 2 x windowSize positions; if fewer
than windowSize remain (a persistent shift quarantines everything), the
loop falls back to the plain contiguous window, which is what lets a
permanent baseline change be absorbed instead of alarming forever.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .errors import ConfigError, DataError, FitError
from .frame import SeriesFrame, format_timestamp, format_value
from .forecast import (
    KIND_NAIVE,
    KIND_NEURAL,
    ForecastModelSpec,
    fit,
    predict,
    predict_multivariate,
)
from .preprocess import Preprocessor, fit_pipeline

logger = logging.getLogger(__name__)

LABEL_WARMUP = "Warmup"
LABEL_NORMAL = "Normal"
LABEL_EVENT = "Event"

# tau floor: a perfectly constant training signal would otherwise flag every
# finite residual, including rounding noise.
TAU_FLOOR = 1e-9

DEFAULT_PREPROCESSORS = (
    Preprocessor(kind="ImputeInterpolation"),
    Preprocessor(kind="NormalizeZScore"),
)


@dataclass(frozen=True)
class DetectorConfig:
    """Tunable parameters of the detect loop."""

    window_size: int = 1000
    n_iterations_refit: int = 5
    model_spec: ForecastModelSpec = field(default_factory=ForecastModelSpec)
    preprocessors: tuple = DEFAULT_PREPROCESSORS
    n_standard_deviations: float = 2.0
    event_threshold: float = 0.7
    bed_window_size: int = 10
    trial_success_prob: float = 0.5
    robust_training: bool = True
    absolute_thresholds: Optional[Mapping[str, float]] = None

    def __post_init__(self):
        if self.window_size < 1:
            raise ConfigError("windowSize must be >= 1")
        if self.n_iterations_refit < 1:
            raise ConfigError("nIterationsRefit must be >= 1")
        if self.n_standard_deviations < 0:
            raise ConfigError("nStandardDeviations must be >= 0")
        if not 0.0 <= self.event_threshold <= 1.0:
            raise ConfigError("eventThreshold must lie in [0, 1]")
        if self.bed_window_size < 1:
            raise ConfigError("bedWindowSize must be >= 1")
        if not 0.0 < self.trial_success_prob < 1.0:
            raise ConfigError("trialSuccessProb must lie in (0, 1)")
        if self.bed_window_size > self.window_size:
            logger.warning(
                "bedWindowSize %d exceeds windowSize %d; the buffer will span refits",
                self.bed_window_size,
                self.window_size,
            )
        object.__setattr__(self, "preprocessors", tuple(self.preprocessors))
        if self.absolute_thresholds is not None:
            object.__setattr__(self, "absolute_thresholds", dict(self.absolute_thresholds))


@dataclass(frozen=True)
class ClassificationRecord:
    """Per-row verdict of one detect run."""

    index: int
    timestamp: object
    residuals: Mapping[str, float]  # NaN when the cell was missing or warmup
    outliers: Mapping[str, bool]
    is_outlier: bool
    event_probability: float
    label: str


@dataclass(frozen=True)
class DetectionResult:
    config: DetectorConfig
    quality_columns: tuple
    records: tuple
    diagnostics: tuple

    def predicted_events(self) -> np.ndarray:
        return np.array([r.label == LABEL_EVENT for r in self.records], dtype=bool)

    def event_probabilities(self) -> np.ndarray:
        return np.array([r.event_probability for r in self.records], dtype=np.float64)

    def warmup_mask(self) -> np.ndarray:
        return np.array([r.label == LABEL_WARMUP for r in self.records], dtype=bool)

    def to_csv(self) -> str:
        """One row per input row; shape is stable across runs for diffing."""
        lines = []
        header = ["timestamp"]
        header += [f"residual_{c}" for c in self.quality_columns]
        header += ["isOutlier", "eventProbability", "label"]
        lines.append(",".join(header))
        for r in self.records:
            cells = [format_timestamp(r.timestamp)]
            cells += [format_value(r.residuals[c]) for c in self.quality_columns]
            cells.append("1" if r.is_outlier else "0")
            cells.append(format_value(r.event_probability))
            cells.append(r.label)
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def to_json_doc(self) -> dict:
        return {
            "config": config_echo(self.config),
            "qualityColumns": list(self.quality_columns),
            "diagnostics": list(self.diagnostics),
            "records": [
                {
                    "index": r.index,
                    "timestamp": format_timestamp(r.timestamp),
                    "residuals": {c: _json_float(r.residuals[c]) for c in self.quality_columns},
                    "outliers": {c: bool(r.outliers[c]) for c in self.quality_columns},
                    "isOutlier": r.is_outlier,
                    "eventProbability": r.event_probability,
                    "label": r.label,
                }
                for r in self.records
            ],
        }


def _json_float(v: float):
    return None if math.isnan(v) else v


def config_echo(config: DetectorConfig) -> dict:
    """Config as the camelCase document accepted back by the config loader."""
    spec = config.model_spec
    return {
        "windowSize": config.window_size,
        "nIterationsRefit": config.n_iterations_refit,
        "modelSpec": {
            "kind": spec.kind,
            "maxP": spec.max_p,
            "dChoices": list(spec.d_choices),
            "includeIntercept": spec.include_intercept,
            "gridStep": spec.grid_step,
            "hiddenUnits": spec.hidden_units,
            "epochs": spec.epochs,
            "learningRate": spec.learning_rate,
            "seed": spec.seed,
        },
        "preprocessors": [
            {
                "kind": p.kind,
                "maWindow": p.ma_window,
                "fillValue": p.fill_value,
                "rangeLo": p.range_lo,
                "rangeHi": p.range_hi,
            }
            for p in config.preprocessors
        ],
        "nStandardDeviations": config.n_standard_deviations,
        "eventThreshold": config.event_threshold,
        "bedWindowSize": config.bed_window_size,
        "trialSuccessProb": config.trial_success_prob,
        "robustTraining": config.robust_training,
        "absoluteThresholds": dict(config.absolute_thresholds) if config.absolute_thresholds else None,
    }


def bed_probability(outlier_count: int, window_n: int, p: float = 0.5) -> float:
    """Binomial CDF of the outlier count: P[X <= r] for X ~ B(n, p).

    Low counts mean behavior consistent with background outlier noise; as
    the count grows the value approaches 1 and crosses the event threshold.
    """
    if window_n <= 0:
        raise ConfigError("binomial window must be positive")
    if not 0 <= outlier_count <= window_n:
        raise ConfigError(f"outlier count {outlier_count} outside [0, {window_n}]")
    if not 0.0 < p < 1.0:
        raise ConfigError("trial probability must lie in (0, 1)")
    q = 1.0 - p
    return float(sum(math.comb(window_n, i) * p**i * q ** (window_n - i) for i in range(outlier_count + 1)))


def classify_residuals(residuals: Mapping[str, float], thresholds: Mapping[str, float]) -> tuple:
    """Strict comparison per column; a missing residual is never an outlier."""
    outliers = {}
    for name, value in residuals.items():
        tau = thresholds[name]
        if tau < 0:
            raise ConfigError(f"threshold for column {name!r} must be >= 0")
        outliers[name] = bool(not math.isnan(value) and abs(value) > tau)
    return outliers, any(outliers.values())


def _training_indices(w: int, config: DetectorConfig, flagged: np.ndarray, quarantined: np.ndarray) -> tuple:
    """Rows to train on for the window ending at w (exclusive)."""
    window = config.window_size
    if not config.robust_training:
        return np.arange(w - window, w), False
    lo = max(0, w - 2 * window)
    hold_from = w - config.bed_window_size
    eligible = [
        r
        for r in range(lo, w)
        if not quarantined[r] and not (flagged[r] and r >= hold_from)
    ]
    if len(eligible) >= window:
        return np.array(eligible[-window:], dtype=np.intp), False
    return np.arange(w - window, w), True


def detect_events(frame: SeriesFrame, config: DetectorConfig) -> DetectionResult:
    """Run the sliding loop over every row of the frame.

    Rows [0, windowSize) are Warmup: no model has seen enough history to
    judge them.  Every later row gets residuals, an outlier verdict, an
    event probability, and a label.  A window whose model fit fails falls
    back to last-value forecasting and leaves a diagnostic.
    """
    n = len(frame)
    window = config.window_size
    if n < window + 1:
        raise DataError(f"frame length {n} must exceed windowSize {window}")
    quality = frame.quality_columns
    if not quality:
        raise DataError("no quality columns to detect on")
    for name in quality:
        if np.isnan(frame.values(name)).all():
            raise DataError(f"quality column {name!r} is entirely missing; imputation impossible")
    if window < config.model_spec.min_window():
        raise DataError(
            f"windowSize {window} is below the {config.model_spec.kind} minimum of "
            f"{config.model_spec.min_window()}"
        )

    raw = {name: frame.values(name) for name in quality}
    flagged = np.zeros(n, dtype=bool)
    quarantined = np.zeros(n, dtype=bool)
    buffer = deque(maxlen=config.bed_window_size)
    diagnostics = []

    records = [
        ClassificationRecord(
            index=i,
            timestamp=frame.timestamps[i],
            residuals={c: math.nan for c in quality},
            outliers={c: False for c in quality},
            is_outlier=False,
            event_probability=0.0,
            label=LABEL_WARMUP,
        )
        for i in range(window)
    ]

    w = window
    while w < n:
        h = min(config.n_iterations_refit, n - w)
        idx, fell_back = _training_indices(w, config, flagged, quarantined)
        if fell_back:
            diagnostics.append(f"window@{w}: too few clean rows, trained on the contiguous window")

        train_pre = {}
        pipelines = {}
        for name in quality:
            col = raw[name][idx]
            if np.isnan(col).all():
                diagnostics.append(f"window@{w}: column {name!r} all missing in window, filled with 0")
            train_pre[name], pipelines[name] = fit_pipeline(col, config.preprocessors)

        model = None
        try:
            model = fit(train_pre, config.model_spec)
        except (FitError, DataError) as exc:
            diagnostics.append(f"window@{w}: fit failed ({exc}); fell back to last-value forecasts")
            fallback = ForecastModelSpec(kind=KIND_NAIVE)
            model = fit(train_pre, fallback)

        thresholds = {}
        for name in quality:
            tau = max(config.n_standard_deviations * model.train_residual_sd[name], TAU_FLOOR)
            if config.absolute_thresholds and name in config.absolute_thresholds:
                tau = float(config.absolute_thresholds[name])
            thresholds[name] = tau

        last_train_pos = int(idx[-1])
        steps = (w + h - 1) - last_train_pos
        horizon_pre = {
            name: pipelines[name].apply_later(raw[name][last_train_pos + 1 : w + h]) for name in quality
        }
        if model.spec.kind == KIND_NEURAL:
            measured = {name: _fill_forward(horizon_pre[name], train_pre[name][-1]) for name in quality}
            preds = predict_multivariate(model, measured)
        else:
            preds = predict(model, steps)

        for i in range(h):
            r = w + i
            offset = r - last_train_pos - 1
            residuals = {}
            for name in quality:
                observed = horizon_pre[name][offset]
                residuals[name] = float(observed - preds[name][offset]) if not math.isnan(observed) else math.nan
            outliers, is_outlier = classify_residuals(residuals, thresholds)
            flagged[r] = is_outlier
            buffer.append(is_outlier)
            rho = bed_probability(sum(buffer), len(buffer), config.trial_success_prob)
            is_event = rho > config.event_threshold
            if is_event and config.robust_training:
                quarantined[r] = True
                back = r - 1
                while back >= 0 and flagged[back] and not quarantined[back]:
                    quarantined[back] = True
                    back -= 1
            records.append(
                ClassificationRecord(
                    index=r,
                    timestamp=frame.timestamps[r],
                    residuals=residuals,
                    outliers=outliers,
                    is_outlier=is_outlier,
                    event_probability=rho,
                    label=LABEL_EVENT if is_event else LABEL_NORMAL,
                )
            )
        w += h

    return DetectionResult(
        config=config,
        quality_columns=quality,
        records=tuple(records),
        diagnostics=tuple(diagnostics),
    )


def _fill_forward(values: np.ndarray, seed_value: float) -> np.ndarray:
    """Replace missing cells with the most recent observed value."""
    out = np.array(values, dtype=np.float64)
    fill = seed_value
    for i in range(len(out)):
        if math.isnan(out[i]):
            out[i] = fill
        else:
            fill = out[i]
    return out
