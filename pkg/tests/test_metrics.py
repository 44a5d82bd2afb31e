import numpy as np
import pytest

from rtme.metrics import pair_confusion, scaled_errors, wfm
from rtme.types import ValidationError

from oracles import pairwise_wfm

ONE = (1, 1, 1, 1, 1, 1, 1)
THREE = (1, 1, 2, 2, 3, 3, 3)

TABLE_ROWS = [
    (ONE, ONE, 100.0),
    (ONE, (1, 1, 1, 1, 1, 2, 2), 84.6),
    (ONE, (1, 1, 1, 1, 1, 2, 3), 82.0),
    (ONE, (1, 1, 1, 1, 1, 2, 3), 82.0),
    (ONE, (1, 1, 1, 1, 2, 3, 4), 66.7),
    (ONE, (1, 1, 2, 3, 4, 5, 6), 20.0),
    (ONE, (1, 2, 3, 4, 5, 6, 7), 0.0),
    (THREE, THREE, 100.0),
    (THREE, (1, 1, 2, 2, 3, 3, 4), 88.2),
    (THREE, (1, 1, 2, 2, 2, 3, 3), 60.0),
    (THREE, (1, 1, 2, 2, 3, 4, 5), 77.0),
    (THREE, (1, 1, 2, 2, 2, 3, 4), 47.6),
    (THREE, (1, 1, 2, 3, 4, 5, 6), 55.6),
    (THREE, (1, 2, 2, 3, 3, 4, 5), 0.0),
    (THREE, (1, 2, 3, 4, 5, 6, 7), 0.0),
]


@pytest.mark.parametrize("true, est, expected", TABLE_ROWS)
def test_reference_table(true, est, expected):
    got = wfm(true, est)
    assert abs(round(got, 1) - expected) <= 0.1
    assert got == pytest.approx(pairwise_wfm(true, est), abs=1e-12)


def test_confusion_counts():
    assert pair_confusion(ONE, (1, 1, 1, 1, 1, 2, 2)) == (11, 0, 10)
    with pytest.raises(ValidationError):
        pair_confusion(ONE, (1, 1))


def test_scaled_error_examples():
    truth = np.ones(20)
    assert scaled_errors(truth, truth)["mse"] == 0.0
    out = scaled_errors(np.full(20, 1.1), truth, truth - 1, truth + 1)
    assert out["mse"] == pytest.approx(0.01)
    assert out["bias_pct"] == pytest.approx(10.0)
    assert out["coverage_pct"] == 100.0
    assert out["n_days"] == 13


def test_first_week_is_ignored():
    truth = np.ones(10)
    est = np.ones(10)
    est[:7] = 50.0
    assert scaled_errors(est, truth)["mse"] == 0.0


def test_zero_truth_rejected():
    truth = np.ones(10)
    truth[8] = 0
    with pytest.raises(ValidationError, match="zero truth"):
        scaled_errors(np.ones(10), truth)
