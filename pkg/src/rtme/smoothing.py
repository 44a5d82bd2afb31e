"""Objective choice between the measurement-error model and pre-analysis case smoothing.

Volatility is measured by the lag-one autocorrelation of an R_t estimate. The
smoothing route is chosen only when its R_t series is more autocorrelated than
the upper confidence bound for the measurement-error series.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .types import ValidationError

MEASUREMENT_ERROR = "MeasurementErrorModel"
CASE_SMOOTHING = "CaseSmoothing"


def smooth_cases(counts, window: int = 7) -> np.ndarray:
    """Centred rolling mean rounded to integers; edge days average what is available."""
    x = np.asarray(counts, dtype=float)
    if window < 3 or window % 2 == 0 or window > x.size:
        raise ValidationError("window must be odd, at least 3 and no longer than the series")
    half = window // 2
    csum = np.concatenate([[0.0], np.cumsum(x)])
    idx = np.arange(x.size)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half + 1, x.size)
    means = (csum[hi] - csum[lo]) / (hi - lo)
    return np.floor(means + 0.5).astype(np.int64)


def _acf(x: np.ndarray, k: int) -> float:
    xc = x - x.mean()
    return float(np.dot(xc[:-k], xc[k:]) / np.dot(xc, xc))


def lag1_autocorr(series) -> float:
    """Sample lag-one autocorrelation of consecutive values (x_t, x_{t+1}).

    This is the usual time-series estimator: the pairs are centred on the
    whole-series mean and scaled by the whole-series variance. It gives 0.97 for
    the series 1..100, where the correlation of the two shifted copies would be
    exactly 1.
    """
    x = np.asarray(series, dtype=float)
    if x.size < 3:
        raise ValidationError("need at least 3 values")
    if np.ptp(x) == 0:
        raise ValidationError("zero variance")
    return _acf(x, 1)


def effective_n(series) -> float:
    """n / (1 + 2 * sum_k rho_k^2) over lags 1..floor(n^(1/3))."""
    x = np.asarray(series, dtype=float)
    n = x.size
    lags = int(math.floor(n ** (1.0 / 3.0) + 1e-9))
    s = sum(_acf(x, k) ** 2 for k in range(1, lags + 1))
    return n / (1.0 + 2.0 * s)


def lag1_ci(series, level: float = 0.95) -> tuple[float, float]:
    """Fisher-z interval for the lag-one autocorrelation with an autocorrelation-corrected n."""
    x = np.asarray(series, dtype=float)
    if x.size < 20:
        raise ValidationError("need at least 20 values for a confidence interval")
    r = lag1_autocorr(x)
    n_eff = effective_n(x)
    if n_eff <= 3:
        raise ValidationError("insufficient effective sample")
    z = math.atanh(max(min(r, 1 - 1e-15), -1 + 1e-15))
    half = norm.ppf(0.5 + level / 2.0) / math.sqrt(n_eff - 3.0)
    return math.tanh(z - half), math.tanh(z + half)


@dataclass(frozen=True)
class Decision:
    choice: str
    r_me: float
    ci_me: tuple
    r_smooth: float

    def to_dict(self) -> dict:
        return {"r_me": self.r_me, "ci_me": list(self.ci_me), "r_smooth": self.r_smooth, "choice": self.choice}


def choose_approach(rt_me, rt_smooth, skip_first: int = 7, level: float = 0.95) -> Decision:
    me = np.asarray(rt_me, dtype=float)[skip_first:]
    sm = np.asarray(rt_smooth, dtype=float)[skip_first:]
    if me.shape != sm.shape:
        raise ValidationError("R_t series must cover the same days")
    lo, hi = lag1_ci(me, level)
    r_me = lag1_autocorr(me)
    r_sm = lag1_autocorr(sm)
    choice = CASE_SMOOTHING if r_sm > hi else MEASUREMENT_ERROR
    return Decision(choice, r_me, (lo, hi), r_sm)


def decide_from_r(r_smooth: float, ci_me: tuple) -> str:
    return CASE_SMOOTHING if r_smooth > ci_me[1] else MEASUREMENT_ERROR
