import numpy as np
import pytest

from rtme.simulate import (DOW_GROUPS, SimConfig, covariate_mean, phase_schedule, simulate_covariate,
                           simulate_outbreak, simulate_replicates, true_wstar, viability_filter)
from rtme.types import DOW_LABELS, ValidationError


def test_tp1_covariate_bounds():
    rng = np.random.default_rng(0)
    x = simulate_covariate(1, 50, rng)
    phases = phase_schedule(1, 50)
    un = x[np.array(phases) == "unrestricted"]
    assert un.size == 15
    assert np.all((un >= -0.25) & (un <= -0.15))
    assert np.all(np.abs(x - covariate_mean(1, 50)) <= 0.05)


def test_tp3_midpoint():
    assert covariate_mean(3, 30)[14] == pytest.approx(-0.45)
    x = simulate_covariate(3, 30, np.random.default_rng(1))
    assert -0.5 <= x[14] <= -0.4


def test_phase_lengths():
    assert phase_schedule(2, 50).count("lockdown") == 20
    assert phase_schedule(1, 50)[-1] == "equilibrium"


def test_viability_boundary():
    counts = np.full(50, 20)
    assert viability_filter(counts)
    counts[:10] = 3
    assert viability_filter(counts)
    counts[10] = 9
    assert not viability_filter(counts)


def test_true_mixture():
    np.testing.assert_allclose(true_wstar("DS0").pmf, [0.16, 0.32, 0.2475, 0.2725], atol=1e-12)
    assert true_wstar("3C").pmf.tolist() == [1.0, 0.0, 0.0, 0.0]


def test_ds0_has_no_reporting_layer():
    sim = simulate_outbreak(SimConfig(1, "DS0", 50, rng_seed=3))
    assert np.array_equal(sim.observed.counts, sim.latent.istar)
    assert sim.reporting is None
    assert len(sim.serial_given) == 1
    assert np.all(np.abs(sim.observed.covariates[:, 0]) <= 0.1)


def test_ds1c_reporting_groups():
    sim = simulate_outbreak(SimConfig(1, "DS1C", 50, rng_seed=3))
    rep = sim.reporting
    for group, th in zip(DOW_GROUPS, (0.5, 1.5, 1.0)):
        for day in group:
            assert rep.theta[rep.tau[day] - 1] == th
    assert set(rep.tau) == set(DOW_LABELS)


def test_ds3c_parity_and_combination_rule():
    sim = simulate_outbreak(SimConfig(1, "DS3C", 50, rng_seed=2))
    assert np.all(sim.theta_by_day[::2] == 0.5)
    assert np.all(sim.theta_by_day[1::2] > 1.0)
    with pytest.raises(ValidationError):
        SimConfig(2, "DS3C")
    with pytest.raises(ValidationError):
        SimConfig(1, "DS9")


def test_determinism():
    a = simulate_outbreak(SimConfig(1, "DS2B", 50, rng_seed=99))
    b = simulate_outbreak(SimConfig(1, "DS2B", 50, rng_seed=99))
    assert np.array_equal(a.observed.counts, b.observed.counts)
    assert np.array_equal(a.latent.r, b.latent.r)


def test_phase_means_of_r():
    sims, _ = simulate_replicates(SimConfig(1, "DS0", 60, rng_seed=5), 40)
    r = np.array([s.latent.r for s in sims])
    phases = np.array(phase_schedule(1, 60))
    # AR lags relax within a few days of a phase change; skip them
    eq = r[:, phases == "equilibrium"][:, 5:]
    lock = r[:, phases == "lockdown"][:, 5:]
    assert eq.mean() == pytest.approx(1.0, abs=0.05)
    assert lock.mean() == pytest.approx(0.5, abs=0.05)
