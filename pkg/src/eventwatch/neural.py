"""Multivariate one-step nowcasting with small per-column neural networks.

Each column gets its own single-hidden-layer network (logistic hidden
units, linear output) trained by full-batch gradient descent.  The inputs
for column j at step i are the other columns measured at step i plus
column j itself at step i-1.  All inputs and the target are min-max
scaled with ranges captured from the training window, and predictions are
mapped back to the caller's scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FitError


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


def _scale(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    if hi == lo:
        return np.zeros_like(x)
    return (x - lo) / (hi - lo)


def _unscale(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    if hi == lo:
        return np.full_like(x, lo)
    return x * (hi - lo) + lo


@dataclass(frozen=True)
class NeuralColumnModel:
    name: str
    others: tuple  # exogenous column order
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: float
    input_lo: np.ndarray  # per input feature: others..., own lag
    input_hi: np.ndarray
    target_lo: float
    target_hi: float

    def _forward(self, inputs: np.ndarray) -> np.ndarray:
        hidden = _sigmoid(inputs @ self.w1 + self.b1)
        return hidden @ self.w2 + self.b2

    def predict(self, others: np.ndarray, own_prev: np.ndarray) -> np.ndarray:
        """others: (h, n_others) measured values; own_prev: (h,) lagged own."""
        raw = np.column_stack([others, own_prev])
        scaled = np.empty_like(raw)
        for c in range(raw.shape[1]):
            scaled[:, c] = _scale(raw[:, c], self.input_lo[c], self.input_hi[c])
        out = self._forward(scaled)
        return _unscale(out, self.target_lo, self.target_hi)


def _train_net(X: np.ndarray, y: np.ndarray, hidden: int, epochs: int, lr: float, rng, name: str):
    n, n_in = X.shape
    w1 = rng.uniform(-0.5, 0.5, size=(n_in, hidden))
    b1 = rng.uniform(-0.5, 0.5, size=hidden)
    w2 = rng.uniform(-0.5, 0.5, size=hidden)
    b2 = float(rng.uniform(-0.5, 0.5))
    for _ in range(epochs):
        hidden_act = _sigmoid(X @ w1 + b1)
        pred = hidden_act @ w2 + b2
        err = pred - y
        loss = float(err @ err) / n
        if not np.isfinite(loss):
            raise FitError(f"neural network training diverged on column {name!r}")
        g_pred = 2.0 * err / n
        g_w2 = hidden_act.T @ g_pred
        g_b2 = float(np.sum(g_pred))
        g_hidden = np.outer(g_pred, w2) * hidden_act * (1.0 - hidden_act)
        g_w1 = X.T @ g_hidden
        g_b1 = g_hidden.sum(axis=0)
        w1 -= lr * g_w1
        b1 -= lr * g_b1
        w2 -= lr * g_w2
        b2 -= lr * g_b2
    return w1, b1, w2, b2


def fit_columns(arrays: dict, names: tuple, spec) -> tuple:
    """Fit one network per column over a shared training window.

    Returns (column models, per-column residuals, last training row).
    One generator seeded from the configured seed feeds every column in
    order, so a fixed seed reproduces every weight.
    """
    rng = np.random.default_rng(spec.seed)
    length = len(next(iter(arrays.values())))
    ranges = {name: (float(np.min(arrays[name])), float(np.max(arrays[name]))) for name in names}
    column_models = {}
    residuals = {}
    for name in names:
        others = tuple(n for n in names if n != name)
        target = arrays[name][1:]
        feats = [arrays[o][1:] for o in others] + [arrays[name][:-1]]
        lo = np.array([ranges[o][0] for o in others] + [ranges[name][0]])
        hi = np.array([ranges[o][1] for o in others] + [ranges[name][1]])
        X = np.column_stack([_scale(f, lo[c], hi[c]) for c, f in enumerate(feats)])
        y = _scale(target, ranges[name][0], ranges[name][1])
        w1, b1, w2, b2 = _train_net(
            X, y, spec.hidden_units, spec.epochs, spec.learning_rate, rng, name
        )
        model = NeuralColumnModel(
            name=name,
            others=others,
            w1=w1,
            b1=b1,
            w2=w2,
            b2=b2,
            input_lo=lo,
            input_hi=hi,
            target_lo=ranges[name][0],
            target_hi=ranges[name][1],
        )
        column_models[name] = model
        fitted = _unscale(model._forward(X), *ranges[name])
        residuals[name] = arrays[name][1:] - fitted
    last_row = {name: float(arrays[name][length - 1]) for name in names}
    return column_models, residuals, last_row
