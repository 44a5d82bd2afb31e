import json
from pathlib import Path

import pytest

from rtme.cli import main

FAST = ["--chains", "2", "--iters", "300", "--burnin", "150", "--thin", "1", "--seed", "3"]


@pytest.fixture(scope="module")
def sim_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("sim")
    assert main(["simulate", "--tp", "1", "--ds", "2A", "--days", "42", "--reps", "3", "--seed", "7",
                 "--out", str(out)]) == 0
    return out


def test_simulate_layout(sim_dir):
    reps = sorted(p.name for p in sim_dir.iterdir() if p.is_dir())
    assert reps == ["rep_001", "rep_002", "rep_003"]
    rep = sim_dir / "rep_001"
    assert {p.name for p in rep.iterdir()} >= {"truth.csv", "observed.csv", "manifest.json", "serial_1.json",
                                               "serial_2.json", "serial_3.json"}
    first = (rep / "observed.csv").read_text().splitlines()[0]
    meta = json.loads(first[2:])
    assert meta["seed"] == 7 and "config_hash" in meta


def test_simulate_is_byte_identical(sim_dir, tmp_path):
    assert main(["simulate", "--tp", "1", "--ds", "2A", "--days", "42", "--reps", "3", "--seed", "7",
                 "--out", str(tmp_path)]) == 0
    for f in sim_dir.rglob("*"):
        if f.is_file():
            assert (tmp_path / f.relative_to(sim_dir)).read_bytes() == f.read_bytes()


def test_invalid_combination_exit_2(tmp_path):
    assert main(["simulate", "--tp", "2", "--ds", "3C", "--out", str(tmp_path)]) == 2
    assert main(["simulate", "--bogus"]) == 2
    assert main([]) == 2


def test_detect_json(sim_dir, tmp_path):
    out = tmp_path / "det.json"
    assert main(["detect", "--cases", str(sim_dir / "rep_001" / "observed.csv"), "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert set(d) >= {"clusters", "theta_prior", "aic_by_k", "metadata"}


def test_missing_serial_exit_2(sim_dir, tmp_path):
    code = main(["estimate", "--cases", str(sim_dir / "rep_001" / "observed.csv"),
                 "--serial", str(tmp_path / "nope.json"), "--out", str(tmp_path / "e"), *FAST])
    assert code == 2


def test_malformed_cases_exit_2(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("date,cases\n2020-03-01,5\n2020-03-02,-1\n")
    assert main(["detect", "--cases", str(bad)]) == 2


def _estimate(sim_dir, out, *extra):
    rep = sim_dir / "rep_001"
    serial = [str(p) for p in sorted(rep.glob("serial_*.json"))]
    return main(["estimate", "--cases", str(rep / "observed.csv"), "--serial", *serial, "--out", str(out),
                 *FAST, *extra])


def test_estimate_outputs_and_determinism(sim_dir, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    code_a = _estimate(sim_dir, a, "--force-me")
    code_b = _estimate(sim_dir, b, "--force-me")
    assert code_a in (0, 3) and code_a == code_b
    for name in ("rt_summary.csv", "rt_plot.csv", "params.json", "diagnostics.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    header = (a / "rt_summary.csv").read_text().splitlines()[1]
    assert header == "t,rt_mean,rt_lo,rt_hi"
    assert not (a / "decision.json").exists()


def test_force_smooth_skips_decision(sim_dir, tmp_path):
    code = _estimate(sim_dir, tmp_path, "--force-smooth", "--window", "7")
    assert code in (0, 3)
    assert not (tmp_path / "decision.json").exists()
    params = json.loads((tmp_path / "params.json").read_text())
    assert params["approach"] == "CaseSmoothing"


def test_config_file_and_override(sim_dir, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"tp": 1, "ds": "DS0", "days": 30, "reps": 1, "seed": 4}))
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "s1")]) == 0
    assert main(["simulate", "--config", str(cfg), "--seed", "5", "--out", str(tmp_path / "s2")]) == 0
    m1 = json.loads((tmp_path / "s1" / "manifest.json").read_text())
    m2 = json.loads((tmp_path / "s2" / "manifest.json").read_text())
    assert m1["metadata"]["seed"] == 4 and m2["metadata"]["seed"] == 5
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "s3")]) == 2


def test_evaluate_reports_table_columns(sim_dir, tmp_path):
    est = tmp_path / "est"
    _estimate(sim_dir, est, "--force-me")
    out = tmp_path / "metrics.json"
    csv = tmp_path / "metrics.csv"
    rep = sim_dir / "rep_001"
    assert main(["evaluate", "--truth", str(rep / "truth.csv"), "--est", str(est / "rt_summary.csv"),
                 "--clusters", str(est / "detection.json"), "--manifest", str(rep / "manifest.json"),
                 "--out", str(out), "--csv", str(csv)]) == 0
    m = json.loads(out.read_text())
    assert {"MSE", "Bias", "Cov. Prob.", "WFM"} <= set(m)
    assert m["n_days"] == 35
    assert "Cov. Prob." in csv.read_text()
