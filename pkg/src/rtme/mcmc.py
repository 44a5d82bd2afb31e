"""Posterior inference for the measurement-error renewal model.

``run_mcmc`` drives the compiled sampler in ``_kernel``; ``log_posterior`` is an
independent NumPy evaluation of the same joint density, used for checks and for
callers that want to score a state directly.
"""
from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import gammaln, xlogy

from . import _kernel
from .garma import garma_log_means
from .renewal import MEAN_FLOOR, infection_pressure
from .types import (CaseSeries, GarmaParams, LatentState, PosteriorDraws, ReportingModel,
                    SerialIntervalEstimate, ValidationError, component_matrix)


class DivergenceError(RuntimeError):
    pass


class NonFiniteLogPosterior(ArithmeticError):
    def __init__(self, term: str, value: float):
        super().__init__(f"non-finite log posterior in term '{term}' ({value!r})")
        self.term = term


@dataclass(frozen=True)
class SamplerConfig:
    chains: int = 8
    burn_in: int = 2000
    total_iterations: int = 4000
    thin: int = 2
    rng_seed: int = 0
    adapt_window: int | None = None  # defaults to burn_in
    target_accept: float = 0.44
    workers: int = 1

    def __post_init__(self):
        if self.chains < 1:
            raise ValidationError("chains must be >= 1")
        if self.thin < 1:
            raise ValidationError("thin must be >= 1")
        if self.total_iterations <= self.burn_in:
            raise ValidationError("total_iterations must exceed burn_in")
        if not 0 < self.target_accept < 1:
            raise ValidationError("target_accept must lie in (0, 1)")

    @property
    def kept_per_chain(self) -> int:
        return (self.total_iterations - self.burn_in) // self.thin


@dataclass(frozen=True)
class Priors:
    """Hyperparameters. ``theta_alpha``/``lambda_alpha`` of None mean flat Dirichlet(1, ..., 1)."""

    theta_alpha: tuple | None = None
    lambda_alpha: tuple | None = None
    beta_sd: float = 10.0
    phi_sd: float = 1.0
    sigma_r_range: tuple = (0.01, 2.0)
    theta_concentration: float = 10.0


@dataclass(frozen=True)
class IidGammaPrior:
    """Replaces the GARMA layer by independent Gamma(shape, scale) priors on each R_t."""

    shape: float = 1.0
    scale: float = 5.0


@dataclass(frozen=True)
class ModelSpec:
    series: CaseSeries
    serial_components: tuple
    reporting: ReportingModel | None = None  # None: reported cases are the true cases
    ar_order: int = 2
    priors: Priors = field(default_factory=Priors)
    theta_prior_center: tuple | None = None
    rt_prior: IidGammaPrior | None = None

    def __post_init__(self):
        comps = tuple(self.serial_components)
        if not comps:
            raise ValidationError("at least one serial interval component is required")
        if not all(isinstance(c, SerialIntervalEstimate) for c in comps):
            raise ValidationError("serial components must be SerialIntervalEstimate")
        if self.ar_order < 0:
            raise ValidationError("ar_order must be >= 0")
        object.__setattr__(self, "serial_components", comps)

    @property
    def has_measurement_error(self) -> bool:
        return self.reporting is not None

    @property
    def n_clusters(self) -> int:
        return self.reporting.n_clusters if self.reporting is not None else 1

    def theta_alpha(self) -> np.ndarray:
        k = self.n_clusters
        if self.priors.theta_alpha is not None:
            return np.asarray(self.priors.theta_alpha, dtype=float)
        if self.theta_prior_center is not None:
            c = np.asarray(self.theta_prior_center, dtype=float)
            return self.priors.theta_concentration * c / c.sum()
        return np.ones(k)

    def lambda_alpha(self) -> np.ndarray:
        if self.priors.lambda_alpha is not None:
            return np.asarray(self.priors.lambda_alpha, dtype=float)
        return np.ones(len(self.serial_components))

    def describe(self) -> dict:
        return {
            "n_days": self.series.n,
            "measurement_error": self.has_measurement_error,
            "reporting": self.reporting.to_dict() if self.reporting is not None else None,
            "n_serial_components": len(self.serial_components),
            "ar_order": self.ar_order,
            "rt_prior": asdict(self.rt_prior) if self.rt_prior is not None else "garma",
            "priors": {
                "theta": ("dirichlet", self.theta_alpha().tolist()),
                "lambda": ("dirichlet", self.lambda_alpha().tolist()),
                "beta": ("normal", 0.0, self.priors.beta_sd),
                "phi": ("normal", 0.0, self.priors.phi_sd),
                "sigma_r": ("uniform", *self.priors.sigma_r_range),
            },
        }


@dataclass(frozen=True)
class ModelState:
    theta: np.ndarray
    lam: np.ndarray
    garma: GarmaParams
    latent: LatentState


# ---------------------------------------------------------------------------
# Joint density
# ---------------------------------------------------------------------------

def _pois(k, mean):
    mean = np.maximum(mean, MEAN_FLOOR)
    return k * np.log(mean) - mean - gammaln(k + 1.0)


def _dirichlet_logpdf(x, alpha):
    return float(gammaln(alpha.sum()) - gammaln(alpha).sum() + np.sum(xlogy(alpha - 1.0, x)))


def log_posterior_terms(state: ModelState, spec: ModelSpec) -> dict[str, float]:
    """Each layer of the unnormalised log posterior.

    I*_1 carries a flat prior: the first day has no infection history, so its
    renewal term is omitted and the model conditions on it.
    """
    obs = spec.series.counts.astype(float)
    istar = state.latent.istar.astype(float)
    r = state.latent.r
    comps = component_matrix(spec.serial_components)
    wstar = state.lam @ comps
    terms = {}
    if spec.has_measurement_error:
        tau = spec.reporting.cluster_index(spec.series.dates)
        terms["measurement"] = float(np.sum(_pois(obs, state.theta[tau] * istar)))
        k = spec.n_clusters
        terms["theta_prior"] = _dirichlet_logpdf(state.theta / k, spec.theta_alpha()) if k > 1 else 0.0
    else:
        if not np.array_equal(istar, obs):
            raise ValidationError("without measurement error the latent cases must equal the reports")
        terms["measurement"] = 0.0
        terms["theta_prior"] = 0.0
    lam_t = infection_pressure(istar, wstar)
    terms["renewal"] = float(np.sum(_pois(istar[1:], r[1:] * lam_t[1:])))
    if spec.rt_prior is not None:
        a, b = spec.rt_prior.shape, spec.rt_prior.scale
        terms["transmission"] = float(np.sum((a - 1) * np.log(r) - r / b - gammaln(a) - a * math.log(b)))
        terms["garma_prior"] = 0.0
    else:
        g = state.garma
        X = spec.series.design_matrix()
        logmu = garma_log_means(r, X, g.beta, g.phi[: spec.ar_order])
        nu = 1.0 / g.sigma_r**2
        terms["transmission"] = float(np.sum(nu * (math.log(nu) - logmu) - gammaln(nu)
                                             + (nu - 1) * np.log(r) - nu * r * np.exp(-logmu)))
        lo, hi = spec.priors.sigma_r_range
        sig_lp = -math.log(hi - lo) if lo <= g.sigma_r <= hi else -math.inf
        terms["garma_prior"] = float(
            np.sum(-0.5 * (g.beta / spec.priors.beta_sd) ** 2 - math.log(spec.priors.beta_sd * math.sqrt(2 * math.pi)))
            + np.sum(-0.5 * (g.phi / spec.priors.phi_sd) ** 2 - math.log(spec.priors.phi_sd * math.sqrt(2 * math.pi)))
            + sig_lp)
    k_si = len(spec.serial_components)
    terms["lambda_prior"] = _dirichlet_logpdf(state.lam, spec.lambda_alpha()) if k_si > 1 else 0.0
    return terms


def log_posterior(state: ModelState, spec: ModelSpec) -> float:
    terms = log_posterior_terms(state, spec)
    for name, value in terms.items():
        if not math.isfinite(value):
            raise NonFiniteLogPosterior(name, value)
    return float(sum(terms.values()))


# ---------------------------------------------------------------------------
# Sampler driver
# ---------------------------------------------------------------------------

def _chain_seeds(seed: int, chains: int):
    children = np.random.SeedSequence(seed).spawn(chains)
    return [(int(c.generate_state(1, dtype=np.uint32)[0]), np.random.default_rng(c)) for c in children]


def _initial_state(spec: ModelSpec, rng: np.random.Generator, comps: np.ndarray):
    obs = spec.series.counts.astype(float)
    n = obs.size
    k = spec.n_clusters
    if spec.has_measurement_error:
        center = spec.theta_prior_center
        theta = np.ones(k) if center is None else np.asarray(center, float) / np.mean(center)
        tau = spec.reporting.cluster_index(spec.series.dates)
        istar = np.round(obs / theta[tau])
    else:
        theta = np.ones(1)
        tau = np.zeros(n, dtype=np.int64)
        istar = obs.copy()
    lam = np.full(comps.shape[0], 1.0 / comps.shape[0])
    lam_t = infection_pressure(istar, lam @ comps)
    r = np.ones(n)
    ok = lam_t > 0
    r[ok] = np.clip((istar[ok] + 0.5) / lam_t[ok], 0.05, 20.0)
    # a light running median keeps the start away from single-day spikes
    padded = np.pad(r, 2, mode="edge")
    r = np.median(np.lib.stride_tricks.sliding_window_view(padded, 5), axis=1)
    r = r * np.exp(rng.normal(0.0, 0.05, n))
    X = spec.series.design_matrix()
    beta, *_ = np.linalg.lstsq(X, np.log(r), rcond=None)
    beta = beta + rng.normal(0.0, 0.05, beta.size)
    resid = np.log(r) - X @ beta
    lo, hi = spec.priors.sigma_r_range
    sigma = float(np.clip(np.std(resid) if n > 1 else 0.3, max(lo, 0.05), min(hi, 1.5)))
    if spec.rt_prior is not None:
        sigma = 1.0
    phi = np.zeros(spec.ar_order)
    return tau.astype(np.int64), istar, r, theta, lam, beta, phi, sigma


def _config_hash(spec: ModelSpec, config: SamplerConfig) -> str:
    payload = json.dumps({"spec": spec.describe(), "config": asdict(config),
                          "counts": spec.series.counts.tolist()}, sort_keys=True, default=str)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def run_mcmc(spec: ModelSpec, config: SamplerConfig) -> PosteriorDraws:
    """Draw from the joint posterior with per-chain deterministic RNG streams.

    Blocks per iteration: latent cases day by day, R_t day by day, (beta, phi)
    jointly, sigma_R, theta (Dirichlet proposal on the mean-one simplex) and
    the serial mixture weights. Proposal scales adapt during burn-in only.
    """
    comps = np.ascontiguousarray(component_matrix(spec.serial_components))
    X = np.ascontiguousarray(spec.series.design_matrix())
    obs = spec.series.counts.astype(float)
    n = obs.size
    m = spec.ar_order
    kept = config.kept_per_chain
    c = config.chains
    k_rep = spec.n_clusters
    burn = config.burn_in if config.adapt_window is None else min(config.adapt_window, config.burn_in)

    out = {
        "theta": np.zeros((c, kept, k_rep)),
        "lam": np.zeros((c, kept, comps.shape[0])),
        "beta": np.zeros((c, kept, X.shape[1])),
        "phi": np.zeros((c, kept, m)),
        "sigma_r": np.zeros((c, kept)),
        "istar": np.zeros((c, kept, n), dtype=np.int64),
        "r": np.zeros((c, kept, n)),
    }
    acc = np.zeros((c, _kernel.N_BLOCKS))
    tries = np.zeros((c, _kernel.N_BLOCKS))
    scales = np.zeros((c, _kernel.N_BLOCKS))
    theta_alpha = spec.theta_alpha()
    lam_alpha = spec.lambda_alpha()
    lo, hi = spec.priors.sigma_r_range
    rt_mode = 0 if spec.rt_prior is None else 1
    g_shape = spec.rt_prior.shape if spec.rt_prior else 1.0
    g_scale = spec.rt_prior.scale if spec.rt_prior else 1.0

    def one(ci, seed, rng):
        tau, istar, r, theta, lam, beta, phi, sigma = _initial_state(spec, rng, comps)
        status = _kernel.run_chain(
            np.int64(seed), obs, tau, spec.has_measurement_error, comps, X, np.int64(m),
            theta_alpha, lam_alpha, float(spec.priors.beta_sd), float(spec.priors.phi_sd),
            float(lo), float(hi), np.int64(rt_mode), float(g_shape), float(g_scale),
            istar, r, theta, lam, beta, phi, float(sigma),
            np.int64(config.total_iterations), np.int64(config.burn_in), np.int64(burn), np.int64(config.thin),
            float(config.target_accept), 0.23,
            out["theta"][ci], out["lam"][ci], out["beta"][ci], out["phi"][ci], out["sigma_r"][ci],
            out["istar"][ci], out["r"][ci], acc[ci], tries[ci], scales[ci])
        return status

    seeds = _chain_seeds(config.rng_seed, c)
    if config.workers > 1 and c > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            statuses = list(pool.map(lambda a: one(a[0], *a[1]), enumerate(seeds)))
    else:
        statuses = [one(ci, s, g) for ci, (s, g) in enumerate(seeds)]
    for ci, status in enumerate(statuses):
        if status != 0:
            block = _kernel.BLOCK_NAMES[-status - 1]
            raise DivergenceError(
                f"chain {ci}: more than {_kernel.DIVERGENCE_LIMIT} consecutive non-finite proposals in block '{block}'")
    names = _kernel.BLOCK_NAMES
    with np.errstate(invalid="ignore", divide="ignore"):
        rates = np.where(tries > 0, acc / np.maximum(tries, 1), np.nan)
    meta = {
        "model": spec.describe(),
        "sampler": asdict(config),
        "config_hash": _config_hash(spec, config),
        "acceptance": {nm: [None if np.isnan(v) else float(v) for v in rates[:, j]] for j, nm in enumerate(names)},
        "final_scales": {nm: scales[:, j].tolist() for j, nm in enumerate(names)},
        "adapt_iterations": burn,
        "components": comps.tolist(),
    }
    return PosteriorDraws(rng_seed=config.rng_seed, metadata=meta, **out)


# ---------------------------------------------------------------------------
# Summaries and diagnostics
# ---------------------------------------------------------------------------

def split_rhat(draws) -> float:
    """Split-chain potential scale reduction for a (chains, iterations) array."""
    x = np.asarray(draws, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    half = x.shape[1] // 2
    if half < 2:
        return float("nan")
    x = np.concatenate([x[:, :half], x[:, -half:]], axis=0)
    means = x.mean(axis=1)
    w = x.var(axis=1, ddof=1).mean()
    b = half * means.var(ddof=1)
    if w <= 0:
        return 1.0 if b <= 0 else float("inf")
    var_plus = (half - 1) / half * w + b / half
    return float(math.sqrt(var_plus / w))


def effective_sample_size(draws) -> float:
    """Multi-chain ESS with Geyer's initial monotone sequence on pooled autocorrelations."""
    x = np.asarray(draws, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    c, n = x.shape
    if n < 4:
        return float(c * n)
    centered = x - x.mean(axis=1, keepdims=True)
    f = np.fft.rfft(centered, n=2 * n, axis=1)
    acov = np.fft.irfft(f * np.conj(f), axis=1)[:, :n] / n
    chain_var = acov[:, 0] * n / (n - 1)
    w = chain_var.mean()
    if w <= 0:
        return float(c * n)
    b_over_n = x.mean(axis=1).var(ddof=1) if c > 1 else 0.0
    var_plus = (n - 1) / n * w + b_over_n
    rho = 1.0 - (w - acov.mean(axis=0)) / var_plus
    rho[0] = 1.0
    tau = -1.0
    prev = np.inf
    for k in range(0, n - 1, 2):
        pair = rho[k] + rho[k + 1]
        if pair < 0:
            break
        pair = min(pair, prev)
        prev = pair
        tau += 2.0 * pair
    tau = max(tau, 1.0 / math.log10(max(c * n, 10)))
    return float(c * n / tau)


def mcse_mean(draws) -> float:
    x = np.asarray(draws, dtype=float)
    return float(x.std(ddof=1) / math.sqrt(effective_sample_size(x)))


def _scalar_summary(x) -> dict:
    x = np.asarray(x, dtype=float)
    flat = x.reshape(-1)
    lo, hi = np.percentile(flat, [2.5, 97.5])
    return {"mean": float(flat.mean()), "lo": float(lo), "hi": float(hi),
            "rhat": split_rhat(x.reshape(x.shape[0], -1)) if x.ndim == 2 else float("nan")}


def summarize(draws: PosteriorDraws) -> dict:
    """Posterior means, 2.5/97.5 percentile intervals and split R-hat for every scalar."""
    if draws.iterations_kept == 0:
        raise ValidationError("no draws to summarise")
    params = {name: _scalar_summary(arr) for name, arr in draws.scalar_draws().items()}
    pooled = draws.r.reshape(-1, draws.r.shape[2])
    lo, hi = np.percentile(pooled, [2.5, 97.5], axis=0)
    rt = {"mean": pooled.mean(axis=0), "lo": lo, "hi": hi}
    wstar = np.einsum("cik,ks->cis", draws.lam, _component_stack(draws))
    rhats = [p["rhat"] for p in params.values() if math.isfinite(p["rhat"])]
    return {
        "params": params,
        "rt": rt,
        "wstar_mean": wstar.reshape(-1, wstar.shape[2]).mean(axis=0) if wstar.size else np.zeros(0),
        "max_rhat": max(rhats) if rhats else float("nan"),
    }


def _component_stack(draws: PosteriorDraws) -> np.ndarray:
    comps = draws.metadata.get("components")
    if comps is None:
        return np.zeros((draws.lam.shape[2], 0))
    return np.asarray(comps, dtype=float)


def posterior_wstar(draws: PosteriorDraws, components) -> np.ndarray:
    """Posterior mean of the effective serial interval given the component list."""
    comps = component_matrix(components)
    return (draws.lam.reshape(-1, draws.lam.shape[2]) @ comps).mean(axis=0)
