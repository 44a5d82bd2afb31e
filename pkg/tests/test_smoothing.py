import math

import numpy as np
import pytest

from rtme.smoothing import (CASE_SMOOTHING, MEASUREMENT_ERROR, choose_approach, decide_from_r, effective_n,
                            lag1_autocorr, lag1_ci, smooth_cases)
from rtme.types import ValidationError


def test_smooth_examples():
    assert smooth_cases([5] * 10, 7).tolist() == [5] * 10
    assert smooth_cases([0, 0, 0, 7, 0, 0, 0], 7)[3] == 1
    with pytest.raises(ValidationError):
        smooth_cases([1] * 10, 2)
    with pytest.raises(ValidationError):
        smooth_cases([1] * 5, 7)


def test_smooth_edges_use_truncated_window():
    out = smooth_cases([0, 0, 0, 70, 0, 0, 0, 0, 0], 7)
    # day 0 averages days 0..3
    assert out[0] == round(70 / 4)


def test_lag1_examples():
    assert lag1_autocorr(np.arange(1, 101)) == pytest.approx(0.97, abs=0.005)
    alt = np.tile([1.0, -1.0], 50)
    assert lag1_autocorr(alt) == pytest.approx(-1.0, abs=0.02)
    with pytest.raises(ValidationError, match="zero variance"):
        lag1_autocorr([3.0] * 10)
    with pytest.raises(ValidationError):
        lag1_autocorr([1.0, 2.0])


def test_white_noise_interval():
    x = np.random.default_rng(2).normal(size=1000)
    lo, hi = lag1_ci(x)
    assert lo < 0 < hi
    assert hi - lo == pytest.approx(2 * 1.96 / math.sqrt(997), abs=0.01)


def test_autocorrelated_series_widens_interval():
    rng = np.random.default_rng(4)
    x = np.zeros(200)
    for t in range(1, 200):
        x[t] = 0.8 * x[t - 1] + rng.normal()
    lo, hi = lag1_ci(x)
    z = math.atanh(lag1_autocorr(x))
    assert effective_n(x) < 200
    assert hi - lo > math.tanh(z + 1.96 / math.sqrt(197)) - math.tanh(z - 1.96 / math.sqrt(197))


def test_short_series_rejected():
    with pytest.raises(ValidationError):
        lag1_ci(np.arange(10.0))


def test_rule_is_strict():
    ci = (0.2, 0.6)
    assert decide_from_r(0.9, ci) == CASE_SMOOTHING
    assert decide_from_r(0.5, ci) == MEASUREMENT_ERROR
    assert decide_from_r(0.6, ci) == MEASUREMENT_ERROR


def test_choose_approach_on_volatile_vs_smooth():
    rng = np.random.default_rng(7)
    t = np.arange(50)
    smooth = 1 + 0.5 * np.sin(t / 8)
    volatile = smooth + rng.normal(0, 0.4, 50)
    d = choose_approach(volatile, smooth)
    assert d.choice == CASE_SMOOTHING
    assert d.r_smooth > d.ci_me[1]
    assert choose_approach(smooth, volatile).choice == MEASUREMENT_ERROR
    assert set(d.to_dict()) == {"r_me", "ci_me", "r_smooth", "choice"}


def test_first_week_is_skipped():
    rng = np.random.default_rng(1)
    me = rng.normal(1, 0.2, 40)
    sm = rng.normal(1, 0.2, 40)
    a = choose_approach(me, sm)
    me2, sm2 = me.copy(), sm.copy()
    me2[:7] = 100.0
    sm2[:7] = -100.0
    b = choose_approach(me2, sm2)
    assert a == b
