"""Per-column missing-value imputation and normalization.

Imputers fill NaN cells and never touch observed cells, so imputing a
complete column is the identity.  Normalizers are fitted on the training
window and the captured state is reused on later rows, which keeps the
forecast horizon on the same scale without leaking future values.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, DataError

logger = logging.getLogger(__name__)

IMPUTE_INTERPOLATION = "ImputeInterpolation"
IMPUTE_LOCF = "ImputeLOCF"
IMPUTE_MA = "ImputeMA"
IMPUTE_MEAN = "ImputeMean"
IMPUTE_REPLACE = "ImputeReplace"
NORMALIZE_ZSCORE = "NormalizeZScore"
NORMALIZE_MINMAX = "NormalizeMinMax"

IMPUTE_KINDS = (IMPUTE_INTERPOLATION, IMPUTE_LOCF, IMPUTE_MA, IMPUTE_MEAN, IMPUTE_REPLACE)
NORMALIZE_KINDS = (NORMALIZE_ZSCORE, NORMALIZE_MINMAX)

# Config-file spellings, including the R-package style names.
PREPROCESSOR_ALIASES = {
    "ImputeTSInterpolation": IMPUTE_INTERPOLATION,
    "ImputeTSLOCF": IMPUTE_LOCF,
    "ImputeTSMA": IMPUTE_MA,
    "ImputeTSMean": IMPUTE_MEAN,
    "ImputeTSReplace": IMPUTE_REPLACE,
    IMPUTE_INTERPOLATION: IMPUTE_INTERPOLATION,
    IMPUTE_LOCF: IMPUTE_LOCF,
    IMPUTE_MA: IMPUTE_MA,
    IMPUTE_MEAN: IMPUTE_MEAN,
    IMPUTE_REPLACE: IMPUTE_REPLACE,
    NORMALIZE_ZSCORE: NORMALIZE_ZSCORE,
    NORMALIZE_MINMAX: NORMALIZE_MINMAX,
}


@dataclass(frozen=True)
class Preprocessor:
    """One preprocessing step; params beyond the kind's own are ignored."""

    kind: str
    ma_window: int = 4  # neighbors per side for ImputeMA
    fill_value: float = 0.0  # ImputeReplace
    range_lo: float = 0.0  # NormalizeMinMax target range
    range_hi: float = 1.0

    def __post_init__(self):
        if self.kind not in IMPUTE_KINDS + NORMALIZE_KINDS:
            raise ConfigError(f"unknown preprocessor kind {self.kind!r}")
        if self.kind == IMPUTE_MA and self.ma_window < 1:
            raise ConfigError("ImputeMA window must be >= 1")
        if self.kind == NORMALIZE_MINMAX and not self.range_lo < self.range_hi:
            raise ConfigError("min-max range must satisfy lo < hi")


def resolve_preprocessor_name(name: str) -> str:
    if name not in PREPROCESSOR_ALIASES:
        raise ConfigError(f"unknown preprocessor {name!r}")
    return PREPROCESSOR_ALIASES[name]


@dataclass(frozen=True)
class NormalizationState:
    """Scale parameters captured at fit time; degenerate means zero spread."""

    kind: str
    mean: float = 0.0
    sd: float = 1.0
    lo: float = 0.0
    hi: float = 1.0
    range_lo: float = 0.0
    range_hi: float = 1.0
    degenerate: bool = False


def impute(column: np.ndarray, method: Preprocessor) -> np.ndarray:
    """Fill every missing cell of the column per the method."""
    if method.kind not in IMPUTE_KINDS:
        raise ConfigError(f"{method.kind} is not an imputation method")
    x = np.array(column, dtype=np.float64)
    missing = np.isnan(x)
    if missing.all():
        raise DataError("cannot impute an all-missing column")
    if not missing.any():
        return x
    obs_idx = np.flatnonzero(~missing)
    gap_idx = np.flatnonzero(missing)

    if method.kind == IMPUTE_INTERPOLATION:
        # np.interp clamps to the nearest observed value outside the anchors,
        # which is exactly the edge rule for leading/trailing runs.
        x[gap_idx] = np.interp(gap_idx, obs_idx, x[obs_idx])
    elif method.kind == IMPUTE_LOCF:
        fill = x[obs_idx[0]]
        for i in range(len(x)):
            if missing[i]:
                x[i] = fill
            else:
                fill = x[i]
    elif method.kind == IMPUTE_MA:
        if method.ma_window > len(x):
            logger.warning(
                "ImputeMA window %d exceeds column length %d; falling back to mean",
                method.ma_window,
                len(x),
            )
            x[gap_idx] = float(np.mean(x[obs_idx]))
        else:
            x[gap_idx] = [_weighted_ma(x, obs_idx, i, method.ma_window) for i in gap_idx]
    elif method.kind == IMPUTE_MEAN:
        x[gap_idx] = float(np.mean(x[obs_idx]))
    elif method.kind == IMPUTE_REPLACE:
        x[gap_idx] = method.fill_value
    return x


def _weighted_ma(x: np.ndarray, obs_idx: np.ndarray, i: int, k: int) -> float:
    """Weighted average of the k nearest observed neighbors on each side.

    The j-th nearest neighbor gets weight k+1-j, so adjacency counts most.
    A side with fewer observed values contributes what it has.
    """
    pos = np.searchsorted(obs_idx, i)
    left = obs_idx[max(0, pos - k) : pos]
    right = obs_idx[pos : pos + k]
    num = 0.0
    den = 0.0
    for rank, j in enumerate(reversed(left), start=1):
        w = k + 1 - rank
        num += w * x[j]
        den += w
    for rank, j in enumerate(right, start=1):
        w = k + 1 - rank
        num += w * x[j]
        den += w
    return num / den


def fit_normalizer(column: np.ndarray, method: Preprocessor) -> NormalizationState:
    if method.kind not in NORMALIZE_KINDS:
        raise ConfigError(f"{method.kind} is not a normalization method")
    x = np.asarray(column, dtype=np.float64)
    if len(x) < 2:
        raise DataError("normalization needs at least two values")
    if method.kind == NORMALIZE_ZSCORE:
        mean = float(np.mean(x))
        sd = float(np.std(x, ddof=1))
        if sd == 0.0:
            logger.warning("constant column: z-score maps every value to 0")
            return NormalizationState(kind=method.kind, mean=mean, sd=0.0, degenerate=True)
        return NormalizationState(kind=method.kind, mean=mean, sd=sd)
    lo, hi = float(np.min(x)), float(np.max(x))
    if lo == hi:
        logger.warning("constant column: min-max maps every value to the range floor")
        return NormalizationState(
            kind=method.kind, lo=lo, hi=hi, range_lo=method.range_lo, range_hi=method.range_hi, degenerate=True
        )
    return NormalizationState(
        kind=method.kind, lo=lo, hi=hi, range_lo=method.range_lo, range_hi=method.range_hi
    )


def apply_normalizer(column: np.ndarray, state: NormalizationState) -> np.ndarray:
    x = np.asarray(column, dtype=np.float64)
    if state.kind == NORMALIZE_ZSCORE:
        if state.degenerate:
            return np.where(np.isnan(x), np.nan, 0.0)
        return (x - state.mean) / state.sd
    if state.degenerate:
        return np.where(np.isnan(x), np.nan, state.range_lo)
    scale = (state.range_hi - state.range_lo) / (state.hi - state.lo)
    return (x - state.lo) * scale + state.range_lo


def invert_normalizer(column: np.ndarray, state: NormalizationState) -> np.ndarray:
    x = np.asarray(column, dtype=np.float64)
    if state.kind == NORMALIZE_ZSCORE:
        if state.degenerate:
            return np.where(np.isnan(x), np.nan, state.mean)
        return x * state.sd + state.mean
    if state.degenerate:
        return np.where(np.isnan(x), np.nan, state.lo)
    scale = (state.hi - state.lo) / (state.range_hi - state.range_lo)
    return (x - state.range_lo) * scale + state.lo


@dataclass(frozen=True)
class FittedPipeline:
    """Preprocessor list fitted on one training window for one column."""

    steps: tuple
    states: tuple  # NormalizationState or None per step

    def apply_later(self, column: np.ndarray) -> np.ndarray:
        """Scale rows after the window; missing cells stay missing."""
        x = np.asarray(column, dtype=np.float64)
        for step, state in zip(self.steps, self.states):
            if state is not None:
                x = apply_normalizer(x, state)
        return x


def fit_pipeline(column: np.ndarray, steps) -> tuple:
    """Run imputers and fit-then-apply normalizers in order.

    Returns (processed training column, FittedPipeline for later rows).
    A window with no observed value at all is filled with zeros and the
    caller is expected to surface a diagnostic.
    """
    x = np.array(column, dtype=np.float64)
    states = []
    if np.isnan(x).all():
        x = np.zeros_like(x)
    for step in steps:
        if step.kind in IMPUTE_KINDS:
            x = impute(x, step)
            states.append(None)
        else:
            state = fit_normalizer(x, step)
            x = apply_normalizer(x, state)
            states.append(state)
    return x, FittedPipeline(steps=tuple(steps), states=tuple(states))
