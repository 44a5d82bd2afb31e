import datetime as dt
import json

import numpy as np
import pytest

from rtme.types import (CaseSeries, GarmaParams, LatentState, PosteriorDraws, ReportingModel,
                        SerialIntervalEstimate, SerialMixture, ValidationError, component_matrix,
                        dow_label, normalize_to_support, validate_case_series)


def _rows(n=50, start=dt.date(2020, 3, 1)):
    return [{"date": (start + dt.timedelta(days=i)).isoformat(), "cases": str(10 + i), "mobility": str(0.1 * i)}
            for i in range(n)]


def test_fifty_valid_rows():
    s = validate_case_series(_rows())
    assert s.n == 50
    assert s.covariate_names == ("mobility",)
    assert s.day_index.tolist() == list(range(1, 51))
    assert s.design_matrix().shape == (50, 2)
    assert np.all(s.design_matrix()[:, 0] == 1.0)


def test_negative_count_names_row():
    rows = _rows()
    rows[11]["cases"] = "-3"
    with pytest.raises(ValidationError, match="negative count at row 12") as err:
        validate_case_series(rows)
    assert err.value.row == 12


def test_date_gap():
    rows = _rows(5, dt.date(2020, 3, 31))
    del rows[2]  # 2020-04-02
    with pytest.raises(ValidationError, match="date gap"):
        validate_case_series(rows)


def test_dow_mismatch_and_bad_covariate():
    rows = _rows(3)
    rows[1]["dow"] = "Fri"  # 2020-03-02 is a Monday
    with pytest.raises(ValidationError, match="date/dow mismatch at row 2"):
        validate_case_series(rows)
    rows = _rows(3)
    rows[2]["mobility"] = "n/a"
    with pytest.raises(ValidationError, match="non-numeric covariate 'mobility' at row 3"):
        validate_case_series(rows)


def test_dow_labels():
    assert dow_label(dt.date(2020, 3, 1)) == "Sun"
    assert dow_label(dt.date(2020, 3, 4)) == "Wed"
    s = CaseSeries.from_counts([1, 2, 3], start="2020-03-04")
    assert s.dow == ("Wed", "Thu", "Fri")


def test_case_series_csv_roundtrip():
    s = validate_case_series(_rows())
    back = CaseSeries.from_csv(s.to_csv())
    assert back == s
    assert back.covariates.tobytes() == s.covariates.tobytes()


def test_case_series_is_read_only():
    s = CaseSeries.from_counts([1, 2, 3])
    with pytest.raises(ValueError):
        s.counts[0] = 5


def test_normalize_drops_nonpositive_lags():
    est = normalize_to_support([0.2, 0.4, 0.4], lags=[0, 1, 2])
    assert np.allclose(est.pmf, [0.5, 0.5])
    assert est.lags.tolist() == [1, 2]


def test_normalize_identity_on_valid_pmf():
    pmf = [0.8, 0.1, 0.075, 0.025]
    assert np.array_equal(normalize_to_support(pmf).pmf, np.array(pmf))


def test_normalize_rejects_zero_lag_only():
    with pytest.raises(ValidationError, match="no positive support"):
        normalize_to_support([1.0], lags=[0])


def test_serial_estimate_invariants():
    with pytest.raises(ValidationError):
        SerialIntervalEstimate([0.5, 0.4])
    with pytest.raises(ValidationError):
        SerialIntervalEstimate([1.2, -0.2])
    est = SerialIntervalEstimate([0.25, 0.75])
    obj = json.loads(est.to_json())
    assert obj == {"lags": [1, 2], "pmf": [0.25, 0.75]}
    assert SerialIntervalEstimate.from_json(est.to_json()) == est


def test_mixture_pads_shorter_components():
    mix = SerialMixture((SerialIntervalEstimate([1.0]), SerialIntervalEstimate([0.5, 0.5])), [0.5, 0.5])
    assert mix.matrix().tolist() == [[1.0, 0.0], [0.5, 0.5]]
    assert np.allclose(mix.wstar.pmf, [0.75, 0.25])
    assert component_matrix(mix.components).shape == (2, 2)


def test_reporting_model_validation():
    with pytest.raises(ValidationError):
        ReportingModel({"Mon": 1}, [1.0])
    tau = {d: 1 for d in ("Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat")}
    tau["Mon"] = 3
    with pytest.raises(ValidationError, match="contiguous"):
        ReportingModel(tau, [1.0, 1.0])
    with pytest.raises(ValidationError):
        ReportingModel.from_groups([("Mon", "Tue"), ("Wed", "Thu", "Fri"), ("Sat", "Sun")], [0.5, 1.5, 1.5])


def test_reporting_model_cluster_index():
    rep = ReportingModel.from_groups([("Mon", "Tue"), ("Wed", "Thu", "Fri"), ("Sat", "Sun")], [0.5, 1.5, 1.0])
    dates = [dt.date(2020, 3, 1) + dt.timedelta(days=i) for i in range(7)]  # Sunday start
    assert rep.cluster_index(dates).tolist() == [2, 0, 0, 1, 1, 1, 2]
    assert ReportingModel.from_dict(rep.to_dict()) == rep
    assert ReportingModel.single_cluster().n_clusters == 1


def test_unconstrained_theta_allowed():
    rep = ReportingModel.from_groups([("Mon", "Tue"), ("Wed", "Thu", "Fri"), ("Sat", "Sun")],
                                     [0.5, 1.25, 0.8], mean_one_constrained=False)
    assert not rep.mean_one_constrained


def test_garma_and_latent_roundtrip():
    g = GarmaParams([1.21, 2.24], [0.4, -0.167], 0.05)
    assert GarmaParams.from_dict(json.loads(json.dumps(g.to_dict()))) == g
    assert GarmaParams([1.0], [], 0.1).ar_order == 0
    with pytest.raises(ValidationError):
        GarmaParams([1.0], [], 0.0)
    lat = LatentState([1, 2, 3], [0.5, 1.0, 2.0])
    assert LatentState.from_dict(json.loads(json.dumps(lat.to_dict()))) == lat
    with pytest.raises(ValidationError):
        LatentState([1, -2], [1.0, 1.0])
    with pytest.raises(ValidationError):
        LatentState([1, 2], [1.0, 0.0])


def test_posterior_draws_alignment():
    z = np.zeros((2, 5, 1))
    d = PosteriorDraws(z + 1, z + 1, z, z[:, :, :0], np.ones((2, 5)), np.ones((2, 5, 3), int),
                       np.ones((2, 5, 3)), rng_seed=0)
    assert d.chains == 2 and d.iterations_kept == 5
    names = d.scalar_draws()
    assert "theta[1]" in names and "r[3]" in names and "istar[1]" in names and "sigma_r" in names
    with pytest.raises(ValidationError):
        PosteriorDraws(z, z, z, z, np.ones((2, 4)), np.ones((2, 5, 3), int), np.ones((2, 5, 3)), rng_seed=0)
