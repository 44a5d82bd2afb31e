"""Replicated simulation studies behind the acceptance checks and the scripts/ runners.

Each study simulates replicates with per-replicate seeds, fits them one at a
time and returns plain dictionaries so results can be dumped to JSON.
"""
from __future__ import annotations

import datetime as dt
import time
from dataclasses import dataclass, replace

import numpy as np

from .detect import detect_reporting
from .mcmc import ModelSpec, SamplerConfig, run_mcmc, summarize
from .metrics import scaled_errors, wfm
from .simulate import DOW_GROUPS, THETA_DOW, SimConfig, SimOutput, replicate_seed, simulate_replicates
from .smoothing import CASE_SMOOTHING, choose_approach, smooth_cases
from .types import DOW_LABELS, CaseSeries, ReportingModel

DESK_SAMPLER = SamplerConfig(chains=4, burn_in=1000, total_iterations=2000, thin=2)
TRUE_CLUSTERS = tuple(
    next(i + 1 for i, g in enumerate(DOW_GROUPS) if day in g) for day in DOW_LABELS
)


@dataclass(frozen=True)
class StudyConfig:
    trend_pattern: int = 1
    data_scenario: str = "DS0"
    length_days: int = 50
    replicates: int = 100
    rng_seed: int = 2024
    sampler: SamplerConfig = DESK_SAMPLER
    ar_order: int = 2


def fit_replicate(sim: SimOutput, sampler: SamplerConfig, ar_order: int = 2, reporting="truth"):
    """Fit one replicate; ``reporting`` is "truth" (the simulator's τ, if any) or "none"."""
    rep = sim.reporting if reporting == "truth" else None
    spec = ModelSpec(sim.observed, sim.serial_given, rep, ar_order=ar_order)
    draws = run_mcmc(spec, sampler)
    return draws, summarize(draws)


def run_scenario(cfg: StudyConfig, progress=None) -> dict:
    """Scaled MSE, bias and coverage of R_t averaged over replicates, plus θ recovery."""
    sims, attempts = simulate_replicates(
        SimConfig(cfg.trend_pattern, cfg.data_scenario, cfg.length_days, rng_seed=cfg.rng_seed),
        cfg.replicates)
    t0 = time.perf_counter()
    rows, thetas, rhats = [], [], []
    for i, sim in enumerate(sims):
        sampler = replace(cfg.sampler, rng_seed=replicate_seed(cfg.rng_seed + 1, i))
        draws, summ = fit_replicate(sim, sampler, cfg.ar_order)
        rt = summ["rt"]
        rows.append(scaled_errors(rt["mean"], sim.latent.r, rt["lo"], rt["hi"]))
        rhats.append(summ["max_rhat"])
        if sim.reporting is not None:
            thetas.append(draws.theta.reshape(-1, draws.theta.shape[2]).mean(axis=0))
        if progress:
            progress(i, rows[-1])
    out = {
        "scenario": cfg.data_scenario,
        "trend_pattern": cfg.trend_pattern,
        "replicates": len(sims),
        "attempts": attempts,
        "mse": float(np.mean([r["mse"] for r in rows])),
        "bias_pct": float(np.mean([r["bias_pct"] for r in rows])),
        "coverage_pct": float(np.mean([r["coverage_pct"] for r in rows])),
        "median_max_rhat": float(np.median(rhats)),
        "seconds": time.perf_counter() - t0,
    }
    if thetas:
        th = np.array(thetas)
        truth = np.asarray(sims[0].reporting.theta)
        out["theta_mean"] = th.mean(axis=0).tolist()
        out["theta_truth"] = truth.tolist()
        out["theta_within_015_pct"] = float(100 * np.mean(np.all(np.abs(th - truth) <= 0.15, axis=1)))
    return out


def noiseless_weekly_series(seed: int, weeks: int = 8) -> tuple[CaseSeries, tuple]:
    """Flat latent cases times the θ = (0.5, 1.5, 1.0) weekly pattern; seed sets level and start day."""
    rng = np.random.default_rng(seed)
    level = 2 * int(rng.integers(25, 2500))
    start = dt.date(2020, 3, 1) + dt.timedelta(days=int(rng.integers(0, 7)))
    rep = ReportingModel.from_groups(DOW_GROUPS, THETA_DOW)
    dates = [start + dt.timedelta(days=i) for i in range(7 * weeks)]
    counts = np.rint(level * rep.theta[rep.cluster_index(dates)]).astype(np.int64)
    return CaseSeries(tuple(dates), counts, np.zeros((counts.size, 0)), ()), TRUE_CLUSTERS


def detection_study(n_noiseless: int = 100, n_noisy: int = 100, rng_seed: int = 2024) -> dict:
    exact = []
    for s in range(n_noiseless):
        series, truth = noiseless_weekly_series(replicate_seed(rng_seed, s))
        exact.append(wfm(truth, detect_reporting(series).labels))
    sims, attempts = simulate_replicates(SimConfig(1, "DS2A", 50, rng_seed=rng_seed), n_noisy)
    noisy = [wfm(TRUE_CLUSTERS, detect_reporting(sim.observed).labels) for sim in sims]
    return {
        "noiseless_exact": int(sum(w == 100.0 for w in exact)),
        "noiseless_runs": n_noiseless,
        "noisy_mean_wfm": float(np.mean(noisy)),
        "noisy_runs": len(noisy),
        "noisy_attempts": attempts,
    }


def decide_series(series: CaseSeries, components, sampler: SamplerConfig, ar_order: int = 2,
                  window: int = 7, informative: bool = True):
    """Fit the measurement-error model (detected τ) and the smoothed-case model, then choose."""
    det = detect_reporting(series)
    spec_me = ModelSpec(series, components, det.reporting, ar_order=ar_order,
                        theta_prior_center=tuple(det.theta_prior) if informative else None)
    smoothed = series.with_counts(smooth_cases(series.counts, window))
    spec_sm = ModelSpec(smoothed, components, None, ar_order=ar_order)
    rt_me = summarize(run_mcmc(spec_me, sampler))["rt"]["mean"]
    rt_sm = summarize(run_mcmc(spec_sm, sampler))["rt"]["mean"]
    return choose_approach(rt_me, rt_sm), det


def decision_study(data_scenario: str, replicates: int = 50, rng_seed: int = 2024,
                   sampler: SamplerConfig = DESK_SAMPLER) -> dict:
    sims, attempts = simulate_replicates(SimConfig(1, data_scenario, 50, rng_seed=rng_seed), replicates)
    choices = []
    for i, sim in enumerate(sims):
        s = replace(sampler, rng_seed=replicate_seed(rng_seed + 1, i))
        decision, _ = decide_series(sim.observed, sim.serial_given, s)
        choices.append(decision.choice)
    return {
        "scenario": data_scenario,
        "replicates": len(sims),
        "attempts": attempts,
        "smoothing_pct": 100.0 * float(np.mean([c == CASE_SMOOTHING for c in choices])),
    }
