"""Sliding-window forecasting models.

Univariate kinds fit one column at a time on a training window and predict
h steps ahead; the multivariate neural kind predicts each column from the
other columns measured at the same step plus its own previous value.  Every
fit also records in-sample one-step residuals, whose sample standard
deviation drives the detector's outlier threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .errors import ConfigError, DataError, FitError
from . import neural

KIND_MEANF = "Meanf"
KIND_NAIVE = "Naive"
KIND_DRIFT = "Drift"
KIND_SES = "SES"
KIND_HOLT = "Holt"
KIND_THETA = "Theta"
KIND_ARIMA = "ArimaLite"
KIND_NEURAL = "NeuralMultivariate"

KINDS = (KIND_MEANF, KIND_NAIVE, KIND_DRIFT, KIND_SES, KIND_HOLT, KIND_THETA, KIND_ARIMA, KIND_NEURAL)

_MIN_WINDOW = {
    KIND_MEANF: 1,
    KIND_NAIVE: 1,
    KIND_DRIFT: 2,
    KIND_SES: 2,
    KIND_HOLT: 3,
    KIND_THETA: 3,
    KIND_NEURAL: 10,
}


@dataclass(frozen=True)
class ForecastModelSpec:
    """Model choice plus kind-specific parameters."""

    kind: str = KIND_ARIMA
    max_p: int = 5  # ArimaLite AR order bound
    d_choices: tuple = (0, 1)  # ArimaLite differencing candidates
    include_intercept: bool = True
    grid_step: float = 0.05  # SES/Holt/Theta smoothing grid
    hidden_units: int = 4
    epochs: int = 500
    learning_rate: float = 0.01
    seed: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown model kind {self.kind!r}")
        if self.max_p < 0:
            raise ConfigError("maxP must be >= 0")
        d = tuple(sorted(set(self.d_choices)))
        if not d or any(v not in (0, 1) for v in d):
            raise ConfigError("dChoices must be a non-empty subset of {0, 1}")
        object.__setattr__(self, "d_choices", d)
        if not 0.0 < self.grid_step < 1.0:
            raise ConfigError("grid step must lie in (0, 1)")
        if self.hidden_units < 1:
            raise ConfigError("hiddenUnits must be >= 1")
        if self.epochs < 1 or self.learning_rate <= 0:
            raise ConfigError("epochs must be >= 1 and learningRate > 0")

    def min_window(self) -> int:
        if self.kind == KIND_ARIMA:
            return self.max_p + 2
        return _MIN_WINDOW[self.kind]


def smoothing_grid(step: float) -> np.ndarray:
    """Candidate smoothing parameters 0.01, 0.01+step, ... below 1."""
    grid = np.arange(0.01, 0.99 + 1e-12, step)
    return grid[grid < 1.0]


@dataclass(frozen=True)
class MeanfModel:
    mean: float

    def predict(self, h: int) -> np.ndarray:
        return np.full(h, self.mean)


@dataclass(frozen=True)
class NaiveModel:
    last: float

    def predict(self, h: int) -> np.ndarray:
        return np.full(h, self.last)


@dataclass(frozen=True)
class DriftModel:
    last: float
    slope: float

    def predict(self, h: int) -> np.ndarray:
        return self.last + self.slope * np.arange(1, h + 1)


@dataclass(frozen=True)
class SesModel:
    level: float
    alpha: float

    def predict(self, h: int) -> np.ndarray:
        return np.full(h, self.level)


@dataclass(frozen=True)
class HoltModel:
    level: float
    trend: float
    alpha: float
    beta: float

    def predict(self, h: int) -> np.ndarray:
        return self.level + self.trend * np.arange(1, h + 1)


@dataclass(frozen=True)
class ThetaModel:
    level: float
    drift: float  # half the fitted trend slope
    alpha: float

    def predict(self, h: int) -> np.ndarray:
        return self.level + self.drift * np.arange(1, h + 1)


@dataclass(frozen=True)
class ArimaLiteModel:
    d: int
    p: int
    coef: tuple  # intercept first when present
    intercept: bool
    tail: tuple  # last p values of the (differenced) series
    last_level: float

    def predict(self, h: int) -> np.ndarray:
        hist = list(self.tail)
        out = np.empty(h)
        for i in range(h):
            v = self.coef[0] if self.intercept else 0.0
            for k in range(1, self.p + 1):
                v += self.coef[k - 1 + (1 if self.intercept else 0)] * hist[-k]
            out[i] = v
            hist.append(v)
        if self.d == 1:
            return self.last_level + np.cumsum(out)
        return out


@dataclass(frozen=True)
class FittedModel:
    spec: ForecastModelSpec
    column_order: tuple
    column_models: Mapping[str, object]
    residuals: Mapping[str, np.ndarray]
    train_residual_sd: Mapping[str, float]
    last_row: Optional[Mapping[str, float]] = None  # NeuralMultivariate own-lag seed


def _ses_pass(y: np.ndarray, alpha: float, drift: float = 0.0) -> tuple:
    """One exponential smoothing sweep; returns residuals and final level."""
    level = y[0]
    resid = np.empty(len(y) - 1)
    for t in range(1, len(y)):
        resid[t - 1] = y[t] - (level + drift)
        level = alpha * y[t] + (1 - alpha) * level
    return resid, level


def _fit_ses(y: np.ndarray, grid: np.ndarray, drift: float = 0.0) -> tuple:
    best = None
    for alpha in grid:
        resid, level = _ses_pass(y, float(alpha), drift)
        sse = float(resid @ resid)
        if best is None or sse < best[0]:
            best = (sse, float(alpha), resid, level)
    _, alpha, resid, level = best
    return alpha, resid, level


def _fit_holt(y: np.ndarray, grid: np.ndarray) -> tuple:
    best = None
    for alpha in grid:
        for beta in grid:
            level = y[0]
            trend = y[1] - y[0]
            resid = np.empty(len(y) - 1)
            for t in range(1, len(y)):
                fitted = level + trend
                resid[t - 1] = y[t] - fitted
                new_level = alpha * y[t] + (1 - alpha) * fitted
                trend = beta * (new_level - level) + (1 - beta) * trend
                level = new_level
            sse = float(resid @ resid)
            if best is None or sse < best[0]:
                best = (sse, float(alpha), float(beta), resid, level, trend)
    _, alpha, beta, resid, level, trend = best
    return alpha, beta, resid, level, trend


def _ar_ols(z: np.ndarray, p: int, t0: int, intercept: bool) -> tuple:
    """Least squares of z_t on its first p lags over rows t0..end."""
    rows = np.arange(t0, len(z))
    cols = []
    if intercept:
        cols.append(np.ones(len(rows)))
    for k in range(1, p + 1):
        cols.append(z[rows - k])
    if not cols:
        resid = z[rows]
        return np.empty(0), float(resid @ resid), resid
    X = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(X, z[rows], rcond=None)
    resid = z[rows] - X @ coef
    return coef, float(resid @ resid), resid


# Differencing is only worth it when the level wanders far more than the
# increments; plain var(diff) < var(level) already fires on moderately
# autocorrelated stationary series (ratio 2(1-phi) for an AR(1)) and on a
# geometric decay (ratio 1/4), both of which an AR fit handles better
# undifferenced.  0.2 places the cut at roughly phi = 0.9.
_DIFF_VAR_RATIO = 0.2


def _fit_arima_lite(y: np.ndarray, spec: ForecastModelSpec) -> tuple:
    d = spec.d_choices[0]
    if len(spec.d_choices) == 2 and len(y) >= 3:
        var_level = float(np.var(y, ddof=1))
        var_diff = float(np.var(np.diff(y), ddof=1))
        d = 1 if var_diff < _DIFF_VAR_RATIO * var_level else 0
    z = np.diff(y) if d == 1 else np.asarray(y, dtype=np.float64)
    n = len(z)
    pmax = max(0, min(spec.max_p, n - 2))
    # Exact fits drive SSE to rounding noise; the scale-relative floor lets
    # the AIC penalty break those ties toward the smallest order.
    floor = 1e-20 * float(z @ z) + 1e-300
    best_p, best_aic = 0, None
    for p in range(0, pmax + 1):
        _, sse, resid = _ar_ols(z, p, pmax, spec.include_intercept)
        m = n - pmax
        k = p + (1 if spec.include_intercept else 0)
        aic = m * np.log(max(sse, floor) / m) + 2 * k
        if best_aic is None or aic < best_aic - 1e-12:
            best_p, best_aic = p, aic
    p = best_p
    coef, _, resid = _ar_ols(z, p, p, spec.include_intercept)
    model = ArimaLiteModel(
        d=d,
        p=p,
        coef=tuple(float(c) for c in coef),
        intercept=spec.include_intercept,
        tail=tuple(z[n - p :]) if p else (),
        last_level=float(y[-1]),
    )
    # One-step residuals on the level scale coincide with the differenced
    # residuals when d=1 (prediction = previous level + predicted increment).
    return model, resid


def fit_column(y: np.ndarray, spec: ForecastModelSpec) -> tuple:
    """Fit one column; returns (column model, in-sample residuals)."""
    y = np.asarray(y, dtype=np.float64)
    kind = spec.kind
    if kind == KIND_MEANF:
        mean = float(np.mean(y))
        return MeanfModel(mean), y - mean
    if kind == KIND_NAIVE:
        return NaiveModel(float(y[-1])), np.diff(y)
    if kind == KIND_DRIFT:
        slope = float((y[-1] - y[0]) / (len(y) - 1))
        return DriftModel(float(y[-1]), slope), np.diff(y) - slope
    grid = smoothing_grid(spec.grid_step)
    if kind == KIND_SES:
        alpha, resid, level = _fit_ses(y, grid)
        return SesModel(float(level), alpha), resid
    if kind == KIND_HOLT:
        alpha, beta, resid, level, trend = _fit_holt(y, grid)
        return HoltModel(float(level), float(trend), alpha, beta), resid
    if kind == KIND_THETA:
        t = np.arange(len(y), dtype=np.float64)
        slope = float(np.polyfit(t, y, 1)[0])
        alpha, resid, level = _fit_ses(y, grid, drift=slope / 2.0)
        return ThetaModel(float(level), slope / 2.0, alpha), resid
    if kind == KIND_ARIMA:
        return _fit_arima_lite(y, spec)
    raise ConfigError(f"fit_column does not handle kind {kind!r}")


def _residual_sd(resid: np.ndarray) -> float:
    if len(resid) < 2:
        return 0.0
    return float(np.std(resid, ddof=1))


def fit(window_values: Mapping[str, np.ndarray], spec: ForecastModelSpec) -> FittedModel:
    """Fit the chosen model on a preprocessed training window, one entry per column."""
    if not window_values:
        raise DataError("no columns to fit")
    names = tuple(window_values.keys())
    arrays = {}
    length = None
    for name in names:
        arr = np.asarray(window_values[name], dtype=np.float64)
        if length is None:
            length = len(arr)
        elif len(arr) != length:
            raise DataError("training columns differ in length")
        if not np.isfinite(arr).all():
            raise FitError(f"non-finite values in training window of column {name!r}")
        arrays[name] = arr
    if length < spec.min_window():
        raise DataError(
            f"window of {length} rows is shorter than the {spec.kind} minimum of {spec.min_window()}"
        )
    if spec.kind == KIND_NEURAL:
        if len(names) < 2:
            raise DataError("NeuralMultivariate needs at least two columns")
        column_models, residuals, last_row = neural.fit_columns(arrays, names, spec)
        sds = {name: _residual_sd(residuals[name]) for name in names}
        return FittedModel(spec, names, column_models, residuals, sds, last_row)
    column_models = {}
    residuals = {}
    sds = {}
    for name in names:
        model, resid = fit_column(arrays[name], spec)
        column_models[name] = model
        residuals[name] = resid
        sds[name] = _residual_sd(resid)
    return FittedModel(spec, names, column_models, residuals, sds)


def predict(model: FittedModel, h: int) -> dict:
    """Per-column h-step point forecasts; deterministic for a fitted model."""
    if h < 1:
        raise ConfigError("forecast horizon must be >= 1")
    if model.spec.kind == KIND_NEURAL:
        raise ConfigError("NeuralMultivariate predicts via predict_multivariate")
    return {name: model.column_models[name].predict(h) for name in model.column_order}


def predict_multivariate(model: FittedModel, measured: Mapping[str, np.ndarray]) -> dict:
    """Nowcast each column from the other columns' measured values.

    Step i of column j uses the other columns at step i and column j's
    measured value at step i-1 (the last training row seeds step 0).
    """
    if model.spec.kind != KIND_NEURAL:
        raise ConfigError("predict_multivariate requires a NeuralMultivariate model")
    names = model.column_order
    h = None
    for name in names:
        if name not in measured:
            raise DataError(f"missing measured values for column {name!r}")
        arr = np.asarray(measured[name], dtype=np.float64)
        if h is None:
            h = len(arr)
        elif len(arr) != h:
            raise DataError("measured columns differ in length")
        if np.isnan(arr).any():
            raise DataError(f"missing cell in measured values of column {name!r}")
    out = {}
    for name in names:
        net = model.column_models[name]
        own_prev = np.empty(h)
        own_prev[0] = model.last_row[name]
        own_prev[1:] = np.asarray(measured[name], dtype=np.float64)[: h - 1]
        others = np.column_stack(
            [np.asarray(measured[other], dtype=np.float64) for other in names if other != name]
        )
        out[name] = net.predict(others, own_prev)
    return out
