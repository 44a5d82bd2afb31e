"""Gamma GARMA(m, 0) transmission layer with a log link.

The Gamma is parameterised by its mean mu_t and coefficient of variation
sigma_r: shape nu = 1 / sigma_r**2 and rate nu / mu_t.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .types import GarmaParams


class GarmaError(ArithmeticError):
    pass


@dataclass
class GarmaState:
    """Most-recent-first histories of R, covariate rows and linear predictors."""

    r_history: list = field(default_factory=list)
    x_history: list = field(default_factory=list)
    eta_history: list = field(default_factory=list)

    def push(self, r: float, x_row, eta: float, max_len: int) -> None:
        if r <= 0:
            raise GarmaError("R history entries must be positive")
        self.r_history.insert(0, float(r))
        self.x_history.insert(0, np.asarray(x_row, dtype=float))
        self.eta_history.insert(0, float(eta))
        del self.r_history[max_len:], self.x_history[max_len:], self.eta_history[max_len:]


def garma_log_mean(x_t, params: GarmaParams, state: GarmaState | None = None) -> float:
    eta = float(np.dot(params.beta, x_t))
    if state is None:
        return eta
    lags = min(params.ar_order, len(state.r_history))
    for i in range(lags):
        eta += params.phi[i] * (math.log(state.r_history[i]) - state.eta_history[i])
    return eta


def garma_mean(x_t, params: GarmaParams, state: GarmaState | None = None, t: int | None = None) -> float:
    """Conditional mean of R_t; lags missing from ``state`` drop out of the AR sum."""
    log_mu = garma_log_mean(x_t, params, state)
    try:
        mu = math.exp(log_mu)
    except OverflowError:
        mu = math.inf
    if not math.isfinite(mu) or mu <= 0:
        where = f" at t={t}" if t is not None else ""
        raise GarmaError(f"non-finite GARMA mean{where} (log mean {log_mu!r})")
    return mu


def garma_log_means(r, X, beta, phi) -> np.ndarray:
    """Vectorised log mu_t over a whole series with truncated early lags."""
    r = np.asarray(r, dtype=float)
    eta = np.asarray(X, dtype=float) @ np.asarray(beta, dtype=float)
    out = eta.copy()
    resid = np.log(r) - eta
    for i, p in enumerate(np.atleast_1d(phi), start=1):
        if i < r.size:
            out[i:] += p * resid[:-i]
    return out


def garma_logdensity(r_t, mu_t, sigma_r):
    """log Gamma(r_t | mean mu_t, CV sigma_r). Works elementwise on arrays."""
    r_t, mu_t, sigma_r = np.asarray(r_t, float), np.asarray(mu_t, float), np.asarray(sigma_r, float)
    if np.any(r_t <= 0) or np.any(mu_t <= 0) or np.any(sigma_r <= 0):
        raise ValueError("garma_logdensity needs positive arguments")
    nu = 1.0 / sigma_r**2
    rate = nu / mu_t
    out = nu * np.log(rate) - gammaln(nu) + (nu - 1.0) * np.log(r_t) - rate * r_t
    return out[()] if out.ndim == 0 else out


def dlogdensity_dmu(r_t: float, mu_t: float, sigma_r: float) -> float:
    """Analytic derivative of garma_logdensity with respect to the mean."""
    nu = 1.0 / sigma_r**2
    return nu * (r_t - mu_t) / mu_t**2


def simulate_rt(X, params: GarmaParams, rng: np.random.Generator, draw=None) -> np.ndarray:
    """Draw an R_t path forward from the recursion.

    ``draw(mu, rng)`` overrides the Gamma draw (used for misspecified scenarios).
    """
    X = np.asarray(X, dtype=float)
    state = GarmaState()
    nu = 1.0 / params.sigma_r**2
    out = np.empty(X.shape[0])
    for t in range(X.shape[0]):
        mu = garma_mean(X[t], params, state, t=t + 1)
        r = draw(mu, rng) if draw is not None else rng.gamma(nu, mu / nu)
        out[t] = max(r, 1e-12)
        state.push(out[t], X[t], float(np.dot(params.beta, X[t])), max(params.ar_order, 1))
    return out
