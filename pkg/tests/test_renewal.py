import numpy as np
import pytest

from rtme.renewal import generate_renewal, infection_pressure, plugin_rt, renewal_mean
from rtme.simulate import true_wstar
from rtme.types import SerialIntervalEstimate

from oracles import renewal_path


def test_renewal_mean_examples():
    assert renewal_mean([100] * 6, [0.1, 0.4, 0.3, 0.2], 1.0) == pytest.approx(100.0)
    assert renewal_mean([20, 10], SerialIntervalEstimate([0.5, 0.5]), 2.0) == pytest.approx(30.0)
    assert renewal_mean([], [1.0], 3.0) == 0.0


def test_short_history_counts_missing_days_as_zero():
    # only yesterday is known; the lag-2 weight multiplies a pre-outbreak zero
    assert renewal_mean([10], [0.5, 0.5], 1.0) == pytest.approx(5.0)


def test_plugin_examples():
    r = plugin_rt([10] * 5, [1.0])
    assert np.isnan(r[0]) and np.allclose(r[1:], 1.0)
    r = plugin_rt([10, 20, 40], [1.0])
    assert r[1:].tolist() == [2.0, 2.0]
    r = plugin_rt([0, 0, 5], [1.0])
    assert np.all(np.isnan(r))


def test_pressure_matches_pointwise_mean():
    rng = np.random.default_rng(3)
    x = rng.poisson(30, 25)
    w = true_wstar("DS0").pmf
    lam = infection_pressure(x, w)
    for t in range(x.size):
        assert lam[t] == pytest.approx(renewal_mean(x[:t], w, 1.0), rel=1e-12)


def test_plugin_recovers_generating_r():
    rng = np.random.default_rng(11)
    w = true_wstar("DS0").pmf
    r = rng.uniform(0.6, 1.6, 60)
    x = generate_renewal(r, w, [50.0] * 4)
    assert np.allclose(x, renewal_path(r, w, [50.0] * 4), rtol=1e-12)
    est = plugin_rt(x, w)
    ok = ~np.isnan(est)
    assert ok[4:].all()
    assert np.max(np.abs(est[4:] - r[4:])) < 1e-9


def test_plugin_invariant_to_scaling():
    rng = np.random.default_rng(5)
    x = rng.poisson(40, 30).astype(float)
    w = [0.2, 0.5, 0.3]
    base = plugin_rt(x, w)
    for c in (0.5, 2.0, 10.0):
        np.testing.assert_allclose(plugin_rt(c * x, w), base, rtol=1e-12, equal_nan=True)
