"""Streaming multivariate event detection for sensor time series."""

from .detector import (
    ClassificationRecord,
    DetectionResult,
    DetectorConfig,
    bed_probability,
    classify_residuals,
    detect_events,
)
from .errors import ConfigError, DataError, FitError
from .evaluate import ConfusionMatrix, RocCurve, confusion_matrix, roc_curve, summary_stats
from .forecast import FittedModel, ForecastModelSpec, fit, predict, predict_multivariate
from .frame import (
    CsvOptions,
    SeriesFrame,
    WindowView,
    emit_csv,
    parse_csv,
    select_columns,
    slice_window,
)
from .preprocess import (
    NormalizationState,
    Preprocessor,
    apply_normalizer,
    fit_normalizer,
    impute,
    invert_normalizer,
)
from .simulate import EventSpec, inject_events

__version__ = "0.1.0"

__all__ = [
    "ClassificationRecord",
    "ConfigError",
    "ConfusionMatrix",
    "CsvOptions",
    "DataError",
    "DetectionResult",
    "DetectorConfig",
    "EventSpec",
    "FitError",
    "FittedModel",
    "ForecastModelSpec",
    "NormalizationState",
    "Preprocessor",
    "RocCurve",
    "SeriesFrame",
    "WindowView",
    "apply_normalizer",
    "bed_probability",
    "classify_residuals",
    "confusion_matrix",
    "detect_events",
    "emit_csv",
    "fit",
    "fit_normalizer",
    "impute",
    "inject_events",
    "invert_normalizer",
    "parse_csv",
    "predict",
    "predict_multivariate",
    "roc_curve",
    "select_columns",
    "slice_window",
    "summary_stats",
    "__version__",
]
