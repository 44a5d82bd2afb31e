"""Synthetic outbreaks for the trend patterns TP1-TP3 and data scenarios DS0-DS3C."""
from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .garma import simulate_rt
from .renewal import renewal_mean
from .types import (DOW_LABELS, CaseSeries, GarmaParams, LatentState, ReportingModel,
                    SerialIntervalEstimate, SerialMixture, ValidationError)

W1 = (0.8, 0.1, 0.075, 0.025)
W2 = (0.1, 0.4, 0.3, 0.2)
W3 = (0.05, 0.15, 0.15, 0.65)
LAMBDA = (0.1, 0.7, 0.2)
PHI = (0.4, -0.167)
BETA = {1: (1.21, 2.24), 2: (1.21, 2.24), 3: (1.10, 1.82)}
PHASE_MEANS = {"unrestricted": -0.2, "lockdown": -0.85, "equilibrium": -0.54}
DOW_GROUPS = (("Mon", "Tue"), ("Wed", "Thu", "Fri"), ("Sat", "Sun"))
THETA_DOW = (0.5, 1.5, 1.0)
THETA_DS3B = (0.5, 1.25, 0.8)
DS3C_HIGH = {"unrestricted": 1.23, "lockdown": 2.0, "equilibrium": 1.5}
DS3C_LOW = 0.5

TREND_PHASES = {
    1: (("unrestricted", 0.3), ("lockdown", 0.3), ("equilibrium", 0.4)),
    2: (("unrestricted", 0.2), ("lockdown", 0.2), ("unrestricted", 0.2), ("lockdown", 0.2), ("equilibrium", 0.2)),
}


@dataclass(frozen=True)
class Scenario:
    reporting: str      # "null", "dow", "dow_switch", "dow_biased", "parity"
    serial_given: bool
    predictors: bool
    misspecified: bool
    ar_order: int


SCENARIOS = {
    "DS0": Scenario("null", True, False, False, 0),
    "DS1A": Scenario("null", False, False, False, 0),
    "DS1B": Scenario("null", True, True, False, 2),
    "DS1C": Scenario("dow", True, False, False, 0),
    "DS2A": Scenario("dow", False, True, False, 2),
    "DS2B": Scenario("dow", False, True, True, 2),
    "DS3A": Scenario("dow_switch", False, True, False, 2),
    "DS3B": Scenario("dow_biased", False, True, False, 2),
    "DS3C": Scenario("parity", True, True, False, 2),
}


def scenario_name(ds: str) -> str:
    key = str(ds).upper()
    if not key.startswith("DS"):
        key = "DS" + key
    if key not in SCENARIOS:
        raise ValidationError(f"unknown data scenario '{ds}'")
    return key


@dataclass(frozen=True)
class SimConfig:
    trend_pattern: int = 1
    data_scenario: str = "DS0"
    length_days: int = 50
    seed_cases: int = 50
    rng_seed: int = 0
    sigma_r: float = 0.05
    start_date: dt.date = dt.date(2020, 3, 4)  # a Wednesday
    phase_fractions: tuple | None = None
    lognormal_sd: float = 0.3
    nb_size: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "data_scenario", scenario_name(self.data_scenario))
        if self.trend_pattern not in (1, 2, 3):
            raise ValidationError("trend_pattern must be 1, 2 or 3")
        if self.length_days < 14:
            raise ValidationError("length_days must be at least 14")
        if self.data_scenario == "DS3C" and self.trend_pattern != 1:
            raise ValidationError("DS3C is only defined for trend pattern 1")
        if self.seed_cases < 0:
            raise ValidationError("seed_cases must be non-negative")

    @property
    def scenario(self) -> Scenario:
        return SCENARIOS[self.data_scenario]


@dataclass(frozen=True)
class SimOutput:
    config: SimConfig
    latent: LatentState
    garma: GarmaParams
    theta_by_day: np.ndarray
    reporting: ReportingModel | None   # true day-of-week model when one exists
    lam: np.ndarray
    components: tuple
    wstar: SerialIntervalEstimate
    x_true: np.ndarray
    phases: tuple
    observed: CaseSeries
    serial_given: tuple                # what the estimation model is handed
    kept: bool = True
    extras: dict = field(default_factory=dict)


def phase_schedule(pattern: int, length: int, fractions=None) -> tuple[str, ...]:
    """Phase label per day; TP3 has no discrete phases and returns 'smooth' everywhere."""
    if pattern == 3:
        return ("smooth",) * length
    spec = TREND_PHASES[pattern]
    fr = np.asarray(fractions if fractions is not None else [f for _, f in spec], dtype=float)
    if fr.size != len(spec):
        raise ValidationError(f"trend pattern {pattern} needs {len(spec)} phase fractions")
    bounds = np.round(np.cumsum(fr / fr.sum()) * length).astype(int)
    out, start = [], 0
    for (name, _), end in zip(spec, bounds):
        out.extend([name] * (end - start))
        start = end
    return tuple(out)


def covariate_mean(pattern: int, length: int, fractions=None) -> np.ndarray:
    if pattern == 3:
        t = np.arange(1, length + 1)
        return -0.7 / (1.0 + np.exp(-0.25 * (t - 15))) - 0.1
    return np.array([PHASE_MEANS[p] for p in phase_schedule(pattern, length, fractions)])


def simulate_covariate(pattern: int, length: int, rng: np.random.Generator, fractions=None) -> np.ndarray:
    """Daily-visitation-difference style covariate: phase mean plus Unif(-0.05, 0.05) noise."""
    return covariate_mean(pattern, length, fractions) + rng.uniform(-0.05, 0.05, length)


def viability_filter(counts, threshold: int = 10, max_fraction: float = 0.2) -> bool:
    """False when more than ``max_fraction`` of days report fewer than ``threshold`` cases."""
    counts = np.asarray(counts)
    return bool(np.mean(counts < threshold) <= max_fraction)


def true_wstar(scenario: str) -> SerialIntervalEstimate:
    if scenario_name(scenario) == "DS3C":
        return SerialIntervalEstimate([1.0, 0.0, 0.0, 0.0])
    return SerialMixture(tuple(SerialIntervalEstimate(w) for w in (W1, W2, W3)), np.array(LAMBDA)).wstar


def _theta_by_day(cfg: SimConfig, dates, phases):
    sc = cfg.scenario
    n = len(dates)
    if sc.reporting == "null":
        return np.ones(n), None
    if sc.reporting == "parity":
        theta = np.array([DS3C_LOW if (t + 1) % 2 == 1 else DS3C_HIGH[phases[t]] for t in range(n)])
        return theta, None
    base = THETA_DS3B if sc.reporting == "dow_biased" else THETA_DOW
    rep = ReportingModel.from_groups(DOW_GROUPS, base, mean_one_constrained=sc.reporting != "dow_biased")
    theta = rep.theta[rep.cluster_index(dates)].copy()
    if sc.reporting == "dow_switch":
        theta[n // 2:] = 1.0
    return theta, rep


def simulate_outbreak(cfg: SimConfig) -> SimOutput:
    """Draw R_t from the GARMA recursion, latent cases from the renewal model, then reports."""
    rng = np.random.default_rng(cfg.rng_seed)
    sc = cfg.scenario
    n = cfg.length_days
    dates = tuple(cfg.start_date + dt.timedelta(days=i) for i in range(n))
    phases = phase_schedule(cfg.trend_pattern, n, cfg.phase_fractions)

    x_true = simulate_covariate(cfg.trend_pattern, n, rng, cfg.phase_fractions)
    x_obs = x_true.copy() if sc.predictors else rng.uniform(-0.1, 0.1, n)

    components = tuple(SerialIntervalEstimate(w) for w in (W1, W2, W3))
    lam = np.array(LAMBDA)
    wstar = true_wstar(cfg.data_scenario)
    garma = GarmaParams(BETA[cfg.trend_pattern], PHI[: sc.ar_order], cfg.sigma_r)

    draw_r = None
    if sc.misspecified:
        ln_sd = math.sqrt(math.log1p(cfg.sigma_r**2))

        def draw_r(mu, g):
            return g.lognormal(math.log(mu) - 0.5 * ln_sd**2, ln_sd)

    r = simulate_rt(np.column_stack([np.ones(n), x_true]), garma, rng, draw_r)

    s_star = wstar.max_lag
    istar = np.zeros(n, dtype=np.int64)
    for t in range(n):
        if t < s_star:
            istar[t] = cfg.seed_cases
            continue
        mean = renewal_mean(istar[:t], wstar, r[t])
        if sc.misspecified:
            size = cfg.nb_size
            istar[t] = rng.negative_binomial(size, size / (size + mean)) if mean > 0 else 0
        else:
            istar[t] = rng.poisson(mean)

    theta, rep = _theta_by_day(cfg, dates, phases)
    means = theta * istar
    if sc.reporting == "null":
        counts = istar.copy()  # no reporting layer at all
    elif sc.misspecified:
        sd = cfg.lognormal_sd
        counts = np.zeros(n, dtype=np.int64)
        pos = means > 0
        counts[pos] = np.round(rng.lognormal(np.log(means[pos]) - 0.5 * sd**2, sd))
    else:
        counts = rng.poisson(means)

    observed = CaseSeries(dates, counts, x_obs[:, None], ("x_obs",))
    serial_given = (wstar,) if sc.serial_given else components
    return SimOutput(
        config=cfg, latent=LatentState(istar, r), garma=garma, theta_by_day=theta, reporting=rep,
        lam=lam, components=components, wstar=wstar, x_true=x_true, phases=phases,
        observed=observed, serial_given=serial_given, kept=viability_filter(counts),
    )


def replicate_seed(base_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([base_seed, index]).generate_state(1, dtype=np.uint32)[0])


def simulate_replicates(cfg: SimConfig, n_kept: int, max_attempts: int | None = None):
    """Simulate until ``n_kept`` runs pass the viability filter; returns (kept runs, attempts)."""
    max_attempts = max_attempts or 20 * n_kept
    kept = []
    attempts = 0
    while len(kept) < n_kept and attempts < max_attempts:
        out = simulate_outbreak(replace(cfg, rng_seed=replicate_seed(cfg.rng_seed, attempts)))
        attempts += 1
        if out.kept:
            kept.append(out)
    return kept, attempts


def truth_rows(sim: SimOutput) -> list[dict]:
    rows = []
    for t in range(sim.observed.n):
        rows.append({
            "t": t + 1,
            "date": sim.observed.dates[t].isoformat(),
            "dow": DOW_LABELS[(sim.observed.dates[t].weekday() + 1) % 7],
            "phase": sim.phases[t],
            "rt": repr(float(sim.latent.r[t])),
            "istar": int(sim.latent.istar[t]),
            "theta": repr(float(sim.theta_by_day[t])),
            "x_true": repr(float(sim.x_true[t])),
        })
    return rows
