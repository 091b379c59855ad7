from fractions import Fraction

import numpy as np
import pytest

from eventwatch.errors import ConfigError, DataError, FitError
from eventwatch.forecast import (
    ArimaLiteModel,
    ForecastModelSpec,
    fit,
    predict,
    smoothing_grid,
)


def spec(kind, **kw):
    return ForecastModelSpec(kind=kind, **kw)


def fit_one(y, model_spec):
    return fit({"y": np.asarray(y, dtype=np.float64)}, model_spec)


def ses_sweep(y, alpha, drift=0.0):
    """Reference smoothing pass: residual at t is y[t] minus (level + drift),
    then the level moves toward y[t] by alpha."""
    level = y[0]
    sse = 0.0
    resid = []
    for t in range(1, len(y)):
        e = y[t] - (level + drift)
        resid.append(e)
        sse += e * e
        level = alpha * y[t] + (1 - alpha) * level
    return sse, level, resid


def fraction_ar1_with_intercept(z):
    """Exact rational least squares of z_t on (1, z_{t-1})."""
    rows = range(1, len(z))
    n = Fraction(len(z) - 1)
    sx = sum(Fraction(z[t - 1]) for t in rows)
    sy = sum(Fraction(z[t]) for t in rows)
    sxx = sum(Fraction(z[t - 1]) ** 2 for t in rows)
    sxy = sum(Fraction(z[t - 1]) * Fraction(z[t]) for t in rows)
    det = n * sxx - sx * sx
    c = (sy * sxx - sx * sxy) / det
    phi = (n * sxy - sx * sy) / det
    return float(c), float(phi)


def test_meanf_fit_example():
    model = fit_one([2.0, 4.0, 6.0], spec("Meanf"))
    assert model.column_models["y"].mean == 4.0
    assert list(model.residuals["y"]) == [-2.0, 0.0, 2.0]
    assert model.train_residual_sd["y"] == 2.0
    assert abs(float(np.sum(model.residuals["y"]))) < 1e-9


def test_meanf_predict_example():
    model = fit_one([2.0, 4.0, 6.0], spec("Meanf"))
    assert list(predict(model, 2)["y"]) == [4.0, 4.0]


def test_naive_predict_example():
    model = fit_one([1.0, 5.0, 3.0], spec("Naive"))
    assert list(predict(model, 2)["y"]) == [3.0, 3.0]
    assert list(model.residuals["y"]) == [4.0, -2.0]


def test_drift_predict_example():
    model = fit_one([1.0, 2.0, 3.0], spec("Drift"))
    assert list(predict(model, 2)["y"]) == [4.0, 5.0]


def test_drift_slope_and_residuals():
    model = fit_one([2.0, 4.0, 9.0], spec("Drift"))
    m = model.column_models["y"]
    assert m.slope == 3.5
    assert list(model.residuals["y"]) == [2.0 - 3.5, 5.0 - 3.5]
    assert list(predict(model, 3)["y"]) == [12.5, 16.0, 19.5]


def test_ses_constant_series():
    model = fit_one([5.0] * 30, spec("SES"))
    assert list(predict(model, 4)["y"]) == [5.0, 5.0, 5.0, 5.0]
    assert model.train_residual_sd["y"] == 0.0


def test_ses_alpha_is_grid_optimal():
    rng = np.random.default_rng(8)
    y = np.cumsum(rng.normal(0, 1, 60)) + rng.normal(0, 0.3, 60)
    model = fit_one(y, spec("SES"))
    m = model.column_models["y"]
    chosen_sse, level, resid = ses_sweep(y, m.alpha)
    assert m.level == pytest.approx(level, abs=1e-12)
    assert np.allclose(model.residuals["y"], resid, atol=1e-12)
    for alpha in smoothing_grid(0.05):
        assert chosen_sse <= ses_sweep(y, float(alpha))[0] + 1e-12


def test_holt_exact_linear_series():
    y = 3.0 + 2.0 * np.arange(20, dtype=np.float64)
    model = fit_one(y, spec("Holt"))
    assert float(np.max(np.abs(model.residuals["y"]))) < 1e-9
    pred = predict(model, 5)["y"]
    expect = y[-1] + 2.0 * np.arange(1, 6)
    assert np.max(np.abs(pred - expect)) < 1e-9


def test_holt_pair_is_grid_optimal():
    rng = np.random.default_rng(9)
    y = 0.5 * np.arange(50) + np.cumsum(rng.normal(0, 0.5, 50))

    def sweep(alpha, beta):
        level, trend = y[0], y[1] - y[0]
        sse = 0.0
        for t in range(1, len(y)):
            fitted = level + trend
            e = y[t] - fitted
            sse += e * e
            new_level = alpha * y[t] + (1 - alpha) * fitted
            trend = beta * (new_level - level) + (1 - beta) * trend
            level = new_level
        return sse

    model = fit_one(y, spec("Holt"))
    m = model.column_models["y"]
    chosen = sweep(m.alpha, m.beta)
    grid = smoothing_grid(0.05)
    for alpha in grid:
        for beta in grid:
            assert chosen <= sweep(float(alpha), float(beta)) + 1e-12


def test_theta_on_linear_series():
    y = 2.0 * np.arange(60, dtype=np.float64)
    model = fit_one(y, spec("Theta"))
    m = model.column_models["y"]
    # OLS slope of an exact line is the line's slope; drift is half of it.
    assert m.drift == pytest.approx(1.0, abs=1e-9)
    pred = predict(model, 5)["y"]
    steps = np.diff(pred)
    assert np.all(steps >= 1.0 - 1e-9) and np.all(steps <= 2.0 + 1e-9)
    _, level, _ = ses_sweep(y, m.alpha, drift=m.drift)
    expect = level + m.drift * np.arange(1, 6)
    assert np.max(np.abs(pred - expect)) < 1e-9


def test_arima_with_no_lags_degenerates_to_meanf():
    rng = np.random.default_rng(2)
    y = rng.normal(7, 3, 50)
    arima = fit_one(y, spec("ArimaLite", max_p=0, d_choices=(0,)))
    meanf = fit_one(y, spec("Meanf"))
    assert np.max(np.abs(predict(arima, 6)["y"] - predict(meanf, 6)["y"])) < 1e-10
    assert arima.train_residual_sd["y"] == pytest.approx(meanf.train_residual_sd["y"], abs=1e-10)


def test_arima_differenced_without_intercept_degenerates_to_naive():
    rng = np.random.default_rng(2)
    y = np.cumsum(rng.normal(0, 1, 50))
    arima = fit_one(y, spec("ArimaLite", max_p=0, d_choices=(1,), include_intercept=False))
    naive = fit_one(y, spec("Naive"))
    assert np.max(np.abs(predict(arima, 6)["y"] - predict(naive, 6)["y"])) < 1e-12
    assert np.allclose(arima.residuals["y"], np.diff(y), atol=1e-12)
    assert arima.train_residual_sd["y"] == pytest.approx(naive.train_residual_sd["y"], abs=1e-12)


def test_arima_recovers_exact_first_order_recurrence():
    y = np.empty(100)
    y[0] = 1.0
    for t in range(1, 100):
        y[t] = 0.5 * y[t - 1]
    model = fit_one(y, spec("ArimaLite"))
    m = model.column_models["y"]
    assert m.d == 0
    assert m.p == 1
    assert m.coef[1] == pytest.approx(0.5, abs=1e-6)
    assert abs(m.coef[0]) < 1e-6


def test_arima_coefficients_match_rational_least_squares():
    rng = np.random.default_rng(14)
    z = [0.0]
    for _ in range(120):
        z.append(1.5 + 0.6 * z[-1] + rng.normal(0, 1))
    z = np.array(z)
    model = fit_one(z, spec("ArimaLite", max_p=1, d_choices=(0,)))
    m = model.column_models["y"]
    assert m.p == 1
    c, phi = fraction_ar1_with_intercept(z)
    assert m.coef[0] == pytest.approx(c, abs=1e-9)
    assert m.coef[1] == pytest.approx(phi, abs=1e-9)


def test_arima_differencing_choice():
    rng = np.random.default_rng(42)
    walk = np.cumsum(rng.normal(0, 1, 400))
    assert fit_one(walk, spec("ArimaLite")).column_models["y"].d == 1

    rng = np.random.default_rng(3)
    ar = [0.0]
    for _ in range(400):
        ar.append(0.6 * ar[-1] + rng.normal(0, 1))
    assert fit_one(np.array(ar), spec("ArimaLite")).column_models["y"].d == 0

    rng = np.random.default_rng(4)
    noise = rng.normal(0, 1, 400)
    assert fit_one(noise, spec("ArimaLite")).column_models["y"].d == 0


def test_arima_recursion_hand_computed():
    level = ArimaLiteModel(d=0, p=1, coef=(1.0, 0.5), intercept=True, tail=(4.0,), last_level=4.0)
    assert list(level.predict(3)) == [3.0, 2.5, 2.25]
    diffed = ArimaLiteModel(d=1, p=1, coef=(0.5,), intercept=False, tail=(2.0,), last_level=10.0)
    assert list(diffed.predict(3)) == [11.0, 11.5, 11.75]
    flat = ArimaLiteModel(d=1, p=0, coef=(), intercept=False, tail=(), last_level=10.0)
    assert list(flat.predict(2)) == [10.0, 10.0]


def test_translation_consistency():
    rng = np.random.default_rng(21)
    y = np.cumsum(rng.normal(0, 1, 40)) + 5.0
    for kind in ("Meanf", "Naive", "Drift", "SES", "Holt", "Theta"):
        base = predict(fit_one(y, spec(kind)), 5)["y"]
        for c in (1000.0, -3.75):
            shifted = predict(fit_one(y + c, spec(kind)), 5)["y"]
            assert np.max(np.abs(shifted - (base + c))) < 1e-9, kind


def test_predict_is_deterministic():
    rng = np.random.default_rng(6)
    y = rng.normal(0, 1, 30)
    for kind in ("Meanf", "Naive", "Drift", "SES", "Holt", "Theta", "ArimaLite"):
        a = predict(fit_one(y, spec(kind)), 4)["y"]
        b = predict(fit_one(y.copy(), spec(kind)), 4)["y"]
        assert np.array_equal(a, b), kind


def test_minimum_window_lengths():
    short = {
        "Meanf": 0,
        "Naive": 0,
        "Drift": 1,
        "SES": 1,
        "Holt": 2,
        "Theta": 2,
        "ArimaLite": 6,  # default maxP 5 needs maxP+2 rows
    }
    for kind, n in short.items():
        if n == 0:
            continue
        with pytest.raises(DataError):
            fit_one(np.arange(n, dtype=np.float64), spec(kind))
        fit_one(np.arange(n + 1, dtype=np.float64), spec(kind))


def test_fit_rejects_non_finite_window():
    with pytest.raises(FitError, match="'y'"):
        fit_one([1.0, float("nan"), 3.0], spec("Meanf"))
    with pytest.raises(FitError, match="'y'"):
        fit_one([1.0, float("inf"), 3.0], spec("Meanf"))


def test_fit_rejects_mismatched_columns():
    with pytest.raises(DataError):
        fit({"a": np.zeros(5), "b": np.zeros(4)}, spec("Meanf"))
    with pytest.raises(DataError):
        fit({}, spec("Meanf"))


def test_predict_horizon_must_be_positive():
    model = fit_one([1.0, 2.0], spec("Meanf"))
    with pytest.raises(ConfigError):
        predict(model, 0)


def test_spec_parameter_validation():
    with pytest.raises(ConfigError):
        ForecastModelSpec(kind="Sarimax")
    with pytest.raises(ConfigError):
        ForecastModelSpec(max_p=-1)
    with pytest.raises(ConfigError):
        ForecastModelSpec(d_choices=(2,))
    with pytest.raises(ConfigError):
        ForecastModelSpec(grid_step=1.5)
    with pytest.raises(ConfigError):
        ForecastModelSpec(hidden_units=0)
    with pytest.raises(ConfigError):
        ForecastModelSpec(epochs=0)


def test_smoothing_grid_bounds():
    grid = smoothing_grid(0.05)
    assert grid[0] == pytest.approx(0.01)
    assert grid[-1] < 1.0
    assert np.all(np.diff(grid) > 0)
