"""Config documents: flat JSON files and HTTP job configs.

Keys are camelCase and mirror the detector's parameter names.  Legacy
spellings from the R-style call are accepted as aliases, including the
nested postProcessorControl block.  Unknown keys are rejected with a
field-level message so typos surface instead of silently using defaults.
"""

from __future__ import annotations

import json
from typing import Optional

from .detector import DetectorConfig
from .errors import ConfigError
from .forecast import (
    KIND_ARIMA,
    KIND_DRIFT,
    KIND_HOLT,
    KIND_MEANF,
    KIND_NAIVE,
    KIND_NEURAL,
    KIND_SES,
    KIND_THETA,
    KINDS,
    ForecastModelSpec,
)
from .preprocess import Preprocessor, resolve_preprocessor_name

MODEL_NAMES = {
    "ForecastMeanf": KIND_MEANF,
    "ForecastRWF": KIND_NAIVE,  # drift=true upgrades to Drift
    "ForecastSES": KIND_SES,
    "ForecastHolt": KIND_HOLT,
    "ForecastThetaf": KIND_THETA,
    "ForecastArima": KIND_ARIMA,
    "NeuralNetwork": KIND_NEURAL,
}
MODEL_NAMES.update({kind: kind for kind in KINDS})

KEY_ALIASES = {
    "nStandardDeviationseventThreshold": "nStandardDeviations",
    "buildModelAlgo": "model",
}

IGNORED_KEYS = ("verbosityLevel",)

_MODEL_PARAM_KEYS = (
    "maxP",
    "dChoices",
    "includeIntercept",
    "gridStep",
    "hiddenUnits",
    "epochs",
    "learningRate",
    "seed",
    "drift",
)
_PREPROCESSOR_PARAM_KEYS = ("maWindow", "fillValue", "rangeLo", "rangeHi")
_TOP_KEYS = (
    "windowSize",
    "nIterationsRefit",
    "model",
    "modelSpec",
    "preprocessors",
    "nStandardDeviations",
    "eventThreshold",
    "bedWindowSize",
    "trialSuccessProb",
    "robustTraining",
    "absoluteThresholds",
    "columns",
    "timeColumn",
    "labelColumn",
)


def _field_error(field: str, message: str) -> ConfigError:
    err = ConfigError(f"{field}: {message}")
    err.field = field
    return err


def _require(value, types, field: str, message: str):
    if isinstance(value, bool) and bool not in (types if isinstance(types, tuple) else (types,)):
        raise _field_error(field, message)
    if not isinstance(value, types):
        raise _field_error(field, message)
    return value


def _as_int(doc: dict, key: str) -> Optional[int]:
    if key not in doc:
        return None
    v = doc[key]
    if isinstance(v, float) and v.is_integer():
        v = int(v)
    return _require(v, int, key, "expected an integer")


def _as_float(doc: dict, key: str) -> Optional[float]:
    if key not in doc:
        return None
    return float(_require(doc[key], (int, float), key, "expected a number"))


def _as_bool(doc: dict, key: str) -> Optional[bool]:
    if key not in doc:
        return None
    return _require(doc[key], bool, key, "expected true or false")


def normalize_document(doc: dict) -> dict:
    """Resolve aliases and flatten postProcessorControl; pure function."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    out = {}
    for key, value in doc.items():
        if key in IGNORED_KEYS or value is None:
            continue
        if key == "postProcessorControl":
            _require(value, dict, key, "expected an object")
            for inner_key, inner_value in value.items():
                if inner_value is not None:
                    out[KEY_ALIASES.get(inner_key, inner_key)] = inner_value
            continue
        out[KEY_ALIASES.get(key, key)] = value
    unknown = sorted(set(out) - set(_TOP_KEYS) - set(_MODEL_PARAM_KEYS) - set(_PREPROCESSOR_PARAM_KEYS))
    if len(unknown) == 1:
        raise _field_error(unknown[0], "unknown config key")
    if unknown:
        raise _field_error(unknown[0], f"unknown config keys: {', '.join(unknown)}")
    return out


def resolve_model_name(name: str, drift: bool = False) -> str:
    if name not in MODEL_NAMES:
        raise _field_error("model", f"unknown model {name!r}; choose from {sorted(set(MODEL_NAMES))}")
    kind = MODEL_NAMES[name]
    if name == "ForecastRWF" and drift:
        return KIND_DRIFT
    return kind


def _build_model_spec(doc: dict) -> ForecastModelSpec:
    params = {}
    source = doc
    name = doc.get("model")
    if "modelSpec" in doc:
        spec_doc = _require(doc["modelSpec"], dict, "modelSpec", "expected an object")
        source = dict(spec_doc)
        name = source.pop("kind", source.pop("model", name))
        unknown = sorted(set(source) - set(_MODEL_PARAM_KEYS))
        if unknown:
            raise _field_error(f"modelSpec.{unknown[0]}", "unknown model parameter")
    if name is None:
        name = "ForecastArima"
    _require(name, str, "model", "expected a model name string")
    drift = _as_bool(source, "drift")
    kind = resolve_model_name(name, drift=bool(drift))
    for key, attr in (
        ("maxP", "max_p"),
        ("hiddenUnits", "hidden_units"),
        ("epochs", "epochs"),
        ("seed", "seed"),
    ):
        v = _as_int(source, key)
        if v is not None:
            params[attr] = v
    for key, attr in (("gridStep", "grid_step"), ("learningRate", "learning_rate")):
        v = _as_float(source, key)
        if v is not None:
            params[attr] = v
    v = _as_bool(source, "includeIntercept")
    if v is not None:
        params["include_intercept"] = v
    if "dChoices" in source:
        choices = _require(source["dChoices"], list, "dChoices", "expected a list of 0/1")
        params["d_choices"] = tuple(choices)
    try:
        return ForecastModelSpec(kind=kind, **params)
    except ConfigError as exc:
        raise _field_error("modelSpec", str(exc)) from None


def _build_preprocessors(doc: dict) -> Optional[tuple]:
    if "preprocessors" not in doc:
        return None
    raw = _require(doc["preprocessors"], list, "preprocessors", "expected a list")
    shared = {
        "ma_window": _as_int(doc, "maWindow"),
        "fill_value": _as_float(doc, "fillValue"),
        "range_lo": _as_float(doc, "rangeLo"),
        "range_hi": _as_float(doc, "rangeHi"),
    }
    shared = {k: v for k, v in shared.items() if v is not None}
    steps = []
    for i, entry in enumerate(raw):
        field = f"preprocessors[{i}]"
        if isinstance(entry, str):
            kind = resolve_preprocessor_name(entry)
            params = dict(shared)
        elif isinstance(entry, dict):
            entry = dict(entry)
            name = entry.pop("kind", None)
            if not isinstance(name, str):
                raise _field_error(field, "preprocessor object needs a string kind")
            kind = resolve_preprocessor_name(name)
            params = dict(shared)
            for key, attr in (
                ("maWindow", "ma_window"),
                ("fillValue", "fill_value"),
                ("rangeLo", "range_lo"),
                ("rangeHi", "range_hi"),
            ):
                if key in entry:
                    params[attr] = entry.pop(key)
            if entry:
                raise _field_error(field, f"unknown preprocessor parameters: {sorted(entry)}")
        else:
            raise _field_error(field, "expected a name or an object")
        try:
            steps.append(Preprocessor(kind=kind, **params))
        except ConfigError as exc:
            raise _field_error(field, str(exc)) from None
    return tuple(steps)


def build_detector_config(doc: dict) -> tuple:
    """Turn a config document into (DetectorConfig, ingestion options).

    Ingestion options: columns (quality selection), timeColumn, labelColumn.
    """
    doc = normalize_document(doc)
    kwargs = {}
    for key, attr in (
        ("windowSize", "window_size"),
        ("nIterationsRefit", "n_iterations_refit"),
        ("bedWindowSize", "bed_window_size"),
    ):
        v = _as_int(doc, key)
        if v is not None:
            kwargs[attr] = v
    for key, attr in (
        ("nStandardDeviations", "n_standard_deviations"),
        ("eventThreshold", "event_threshold"),
        ("trialSuccessProb", "trial_success_prob"),
    ):
        v = _as_float(doc, key)
        if v is not None:
            kwargs[attr] = v
    v = _as_bool(doc, "robustTraining")
    if v is not None:
        kwargs["robust_training"] = v
    if "absoluteThresholds" in doc:
        thresholds = _require(doc["absoluteThresholds"], dict, "absoluteThresholds", "expected an object")
        kwargs["absolute_thresholds"] = {
            str(k): float(_require(val, (int, float), f"absoluteThresholds.{k}", "expected a number"))
            for k, val in thresholds.items()
        }
    kwargs["model_spec"] = _build_model_spec(doc)
    preprocessors = _build_preprocessors(doc)
    if preprocessors is not None:
        kwargs["preprocessors"] = preprocessors
    try:
        config = DetectorConfig(**kwargs)
    except ConfigError as exc:
        raise _field_error("config", str(exc)) from None

    columns = None
    if "columns" in doc:
        raw = doc["columns"]
        if isinstance(raw, str):
            raw = [c.strip() for c in raw.split(",") if c.strip()]
        columns = list(_require(raw, list, "columns", "expected a list of column names"))
        if not columns:
            raise _field_error("columns", "empty column selection")
    options = {
        "columns": columns,
        "timeColumn": doc.get("timeColumn"),
        "labelColumn": doc.get("labelColumn"),
    }
    return config, options


def load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config file must contain a JSON object")
    return doc
