"""Renewal-equation arithmetic: infection pressure and the plug-in R_t estimator."""
from __future__ import annotations

import numpy as np

from .types import SerialIntervalEstimate

# Floor for Poisson means built from infection pressure; keeps log-densities finite.
MEAN_FLOOR = 1e-10


def _pmf(wstar) -> np.ndarray:
    if isinstance(wstar, SerialIntervalEstimate):
        return wstar.pmf
    return np.asarray(wstar, dtype=float)


def renewal_mean(history, wstar, r_t: float) -> float:
    """Expected infections today, ``r_t * sum_s w_s * history[-s]``.

    ``history`` lists past daily infections in time order (last entry is yesterday).
    Days before the start of the history count as zero infections.
    """
    w = _pmf(wstar)
    h = np.asarray(history, dtype=float)
    if h.size == 0:
        return 0.0
    k = min(w.size, h.size)
    # w[0] pairs with yesterday, w[1] with the day before, ...
    pressure = float(np.dot(w[:k], h[::-1][:k]))
    return r_t * pressure


def infection_pressure(series, wstar) -> np.ndarray:
    """Lambda_t = sum_s w_s I_{t-s} for every day, zero before the series starts."""
    w = _pmf(wstar)
    x = np.asarray(series, dtype=float)
    n = x.size
    lam = np.zeros(n)
    for s in range(1, w.size + 1):
        if s < n:
            lam[s:] += w[s - 1] * x[: n - s]
    return lam


def plugin_rt(series, wstar) -> np.ndarray:
    """Point estimate R_t = I_t / Lambda_t.

    Days where Lambda_t is zero have no defined estimate and come back as NaN.
    """
    x = np.asarray(series, dtype=float)
    lam = infection_pressure(x, wstar)
    out = np.full(x.size, np.nan)
    ok = lam > 0
    out[ok] = x[ok] / lam[ok]
    return out


def generate_renewal(r, wstar, seed_values) -> np.ndarray:
    """Deterministic real-valued renewal sequence, seeded by ``seed_values`` on the first days."""
    w = _pmf(wstar)
    r = np.asarray(r, dtype=float)
    seed_values = np.asarray(seed_values, dtype=float)
    x = np.zeros(r.size)
    x[: seed_values.size] = seed_values
    for t in range(seed_values.size, r.size):
        x[t] = renewal_mean(x[:t], w, r[t])
    return x


def corrected_plugin_rt(reported, theta_by_day, wstar) -> np.ndarray:
    """Plug-in R_t after dividing each day's reports by its reporting weight.

    Multiplying every weight by the same constant cancels between numerator
    and denominator, so only relative weights matter here.
    """
    x = np.asarray(reported, dtype=float)
    th = np.asarray(theta_by_day, dtype=float)
    if th.shape != x.shape or np.any(th <= 0):
        raise ValueError("theta_by_day must be positive and aligned with the reports")
    return plugin_rt(x / th, wstar)
