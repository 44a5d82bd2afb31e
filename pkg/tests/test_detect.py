import datetime as dt

import numpy as np
import pytest

from rtme.detect import VariationTable, cluster_aic, cluster_days, detect_reporting, rolling_proxy, variation
from rtme.metrics import wfm
from rtme.study import TRUE_CLUSTERS, noiseless_weekly_series
from rtme.types import CaseSeries, ValidationError


def test_proxy_examples():
    p = rolling_proxy([100] * 9, 7)
    assert np.all(np.isnan(p[:3])) and np.all(np.isnan(p[-3:]))
    assert np.allclose(p[3:-3], 100)
    assert rolling_proxy([10, 20, 30, 40, 50], 5)[2] == 30
    with pytest.raises(ValidationError):
        rolling_proxy([1, 2, 3, 4], 5)
    with pytest.raises(ValidationError):
        rolling_proxy([1] * 10, 4)


def test_variation_drops_incomplete_weeks_and_zero_proxy():
    start = dt.date(2020, 3, 1)  # Sunday
    dates = [start + dt.timedelta(days=i) for i in range(35)]
    counts = np.full(35, 20.0)
    table = variation(counts, rolling_proxy(counts, 7), dates)
    # the first and last weeks lose their edge days
    assert table.n_weeks == 3
    assert np.allclose(table.values, 1.0)
    proxy = rolling_proxy(counts, 7)
    proxy[10] = 0.0
    assert variation(counts, proxy, dates).n_weeks == 2


def test_variation_needs_two_weeks():
    dates = [dt.date(2020, 3, 1) + dt.timedelta(days=i) for i in range(14)]
    with pytest.raises(ValidationError, match="complete weeks"):
        variation(np.ones(14), rolling_proxy(np.ones(14), 7), dates)


def _table(values):
    return VariationTable(np.asarray(values, dtype=float), ())


def test_cluster_aic_examples():
    aic, coef = cluster_aic(_table(np.ones((7, 2))), (1,) * 7)
    assert coef.tolist() == [1.0]
    assert np.isfinite(aic)
    two = _table([[0.5, 0.5], [1.5, 1.5]])
    aic2, coef2 = cluster_aic(two, (1, 2))
    assert coef2.tolist() == [0.5, 1.5]
    _, coef1 = cluster_aic(two, (1, 1))
    assert coef1.tolist() == [1.0]
    rss = float(((two.values - 1.0) ** 2).sum())
    assert rss == pytest.approx(1.0)
    assert cluster_aic(two, (1, 1))[0] == pytest.approx(4 * np.log(rss / 4) + 4)
    with pytest.raises(ValidationError, match="empty"):
        cluster_aic(two, (1, 3))


def test_cluster_extremes():
    table = _table(np.random.default_rng(0).uniform(0.5, 1.5, (7, 4)))
    assert cluster_days(table, 1) == (1,) * 7
    assert cluster_days(table, 7) == (1, 2, 3, 4, 5, 6, 7)


def test_three_cluster_recovery():
    series, truth = noiseless_weekly_series(3)
    det = detect_reporting(series)
    assert det.best_k == 3
    assert wfm(truth, det.labels) == 100.0
    by_day = dict(det.reporting.tau)
    th = det.reporting.theta
    assert th[by_day["Mon"] - 1] == pytest.approx(0.5)
    assert th[by_day["Wed"] - 1] == pytest.approx(1.5)
    assert th[by_day["Sat"] - 1] == pytest.approx(1.0)
    assert np.mean(det.theta_prior) == pytest.approx(1.0)


def test_flat_counts_give_one_cluster():
    det = detect_reporting(CaseSeries.from_counts([40] * 56))
    assert det.best_k == 1
    assert det.theta_prior.tolist() == [1.0]


def test_five_day_proxy_distorts_the_weekly_ratios():
    series, truth = noiseless_weekly_series(3)
    truth = np.array(truth)

    def within_spread(table):
        col = table.values[:, 0]
        return max(np.ptp(col[truth == c]) for c in (1, 2, 3))

    t5 = variation(series.counts, rolling_proxy(series.counts, 5), series.dates)
    t7 = variation(series.counts, rolling_proxy(series.counts, 7), series.dates)
    # a 7-day mean is flat under a weekly pattern, so days sharing a weight share a ratio
    assert within_spread(t7) < 1e-12
    assert within_spread(t5) > 0.05


def test_scale_invariance():
    series, _ = noiseless_weekly_series(8)
    noisy = series.with_counts(np.random.default_rng(0).poisson(series.counts))
    a = detect_reporting(noisy)
    b = detect_reporting(noisy.with_counts(noisy.counts * 3))
    assert a.labels == b.labels
    np.testing.assert_allclose(a.theta_prior, b.theta_prior, rtol=1e-12)


def test_output_json_shape():
    series, _ = noiseless_weekly_series(1)
    d = detect_reporting(series).to_dict()
    assert set(d) >= {"clusters", "theta_prior", "aic_by_k"}
    assert len(d["aic_by_k"]) == 7
    assert set(d["clusters"]) == {"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"}


def test_true_cluster_labels():
    # Sun..Sat with {Mon,Tue}=1, {Wed,Thu,Fri}=2, {Sat,Sun}=3
    assert TRUE_CLUSTERS == (3, 1, 1, 2, 2, 2, 3)
