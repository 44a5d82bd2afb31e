"""Day-of-week reporting pattern detection.

Cases are divided by a centred rolling mean to expose relative reporting
variation, the seven day-of-week vectors are clustered for every K in 1..7,
and the clustering with the smallest AIC of a cluster-intercept regression wins.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .types import DOW_LABELS, CaseSeries, ReportingModel, ValidationError, dow_label

RSS_FLOOR = 1e-12


@dataclass(frozen=True)
class VariationTable:
    """Relative reporting variation: row l is day-of-week DOW_LABELS[l], columns are complete weeks."""

    values: np.ndarray
    week_starts: tuple

    @property
    def n_weeks(self) -> int:
        return int(self.values.shape[1])


@dataclass(frozen=True)
class DetectionResult:
    reporting: ReportingModel
    labels: tuple
    theta_prior: np.ndarray
    aic_by_k: tuple
    best_k: int
    table: VariationTable

    def to_dict(self) -> dict:
        return {
            "clusters": dict(self.reporting.tau),
            "theta_prior": self.theta_prior.tolist(),
            "aic_by_k": [float(a) for a in self.aic_by_k],
            "best_k": self.best_k,
        }


def rolling_proxy(counts, window: int = 5) -> np.ndarray:
    """Centred rolling mean; the first and last ``window // 2`` days are NaN (unavailable)."""
    x = np.asarray(counts, dtype=float)
    if window < 1 or window % 2 == 0:
        raise ValidationError("window must be a positive odd integer")
    if x.size < window:
        raise ValidationError(f"need at least {window} days, got {x.size}")
    half = window // 2
    out = np.full(x.size, np.nan)
    kernel = np.ones(window) / window
    out[half: x.size - half] = np.convolve(x, kernel, mode="valid")
    return out


def variation(counts, proxy, dates) -> VariationTable:
    """Ratio of cases to proxy arranged by day-of-week and calendar week (Sunday start).

    Weeks with any unavailable day (edge, zero proxy) are dropped entirely.
    """
    x = np.asarray(counts, dtype=float)
    p = np.asarray(proxy, dtype=float)
    v = np.full(x.size, np.nan)
    ok = np.isfinite(p) & (p > 0)
    v[ok] = x[ok] / p[ok]
    weeks = {}
    for t, day in enumerate(dates):
        row = DOW_LABELS.index(dow_label(day))
        start = day.toordinal() - row
        weeks.setdefault(start, np.full(7, np.nan))[row] = v[t]
    starts = sorted(s for s, col in weeks.items() if np.all(np.isfinite(col)))
    if len(starts) < 2:
        raise ValidationError(f"need at least 2 complete weeks of variation, got {len(starts)}")
    values = np.column_stack([weeks[s] for s in starts])
    return VariationTable(values, tuple(starts))


@lru_cache(maxsize=None)
def _partitions(n: int, k: int) -> tuple:
    """All set partitions of range(n) into exactly k blocks, as canonical label tuples."""
    out = []

    def rec(i, labels, used):
        if n - i < k - used:
            return
        if i == n:
            if used == k:
                out.append(tuple(labels))
            return
        for c in range(used):
            labels.append(c)
            rec(i + 1, labels, used)
            labels.pop()
        if used < k:
            labels.append(used)
            rec(i + 1, labels, used + 1)
            labels.pop()

    rec(0, [], 0)
    return tuple(out)


def _within_ss(points: np.ndarray, labels) -> float:
    labels = np.asarray(labels)
    total = 0.0
    for c in np.unique(labels):
        block = points[labels == c]
        total += float(((block - block.mean(axis=0)) ** 2).sum())
    return total


def cluster_days(table: VariationTable, k: int) -> tuple[int, ...]:
    """Exact k-means partition of the seven day-of-week vectors.

    Seven points admit at most 877 partitions, so the squared-Euclidean optimum
    is found by enumeration. Ties go to the lexicographically smallest labelling.
    Labels are 1-based, numbered by first appearance from Sunday.
    """
    if not 1 <= k <= 7:
        raise ValidationError("k must be between 1 and 7")
    pts = np.asarray(table.values, dtype=float)
    best, best_ss = None, math.inf
    for labels in _partitions(pts.shape[0], k):
        ss = _within_ss(pts, labels)
        if best is None or ss < best_ss - 1e-12 * max(1.0, best_ss):
            best, best_ss = labels, ss
    return tuple(c + 1 for c in best)


def cluster_aic(table: VariationTable, labels) -> tuple[float, np.ndarray]:
    """AIC of regressing every variation cell on cluster indicators, plus cluster means."""
    labels = np.asarray(labels)
    k = int(labels.max())
    vals = np.asarray(table.values, dtype=float)
    coef = np.empty(k)
    rss = 0.0
    for c in range(1, k + 1):
        cells = vals[labels == c]
        if cells.size == 0:
            raise ValidationError(f"cluster {c} is empty")
        coef[c - 1] = cells.mean()
        rss += float(((cells - coef[c - 1]) ** 2).sum())
    n_cells = vals.size
    aic = n_cells * math.log(max(rss / n_cells, RSS_FLOOR)) + 2 * (k + 1)
    return aic, coef


def detect_reporting(series: CaseSeries, proxy_window: int = 7) -> DetectionResult:
    """Pick the day-of-week partition with the smallest AIC and mean-one prior weights.

    ``proxy_window=5`` reproduces the five-day trend proxy; the default seven-day
    window spans a whole week, so a periodic weekly pattern leaves the proxy flat.
    """
    proxy = rolling_proxy(series.counts, proxy_window)
    table = variation(series.counts, proxy, series.dates)
    aics, fits = [], []
    for k in range(1, 8):
        labels = cluster_days(table, k)
        aic, coef = cluster_aic(table, labels)
        aics.append(aic)
        fits.append((labels, coef))
    best = int(np.argmin(aics))  # first minimum: ties favour the smaller K
    labels, coef = fits[best]
    theta = coef / coef.mean()
    rep = ReportingModel(dict(zip(DOW_LABELS, labels)), theta, mean_one_constrained=True)
    return DetectionResult(rep, labels, theta, tuple(aics), best + 1, table)
