"""Shared data model: case series, serial intervals, reporting and transmission parameters.

Every container here is a frozen dataclass whose array fields are made read-only
on construction, so instances can be shared freely between threads.
"""
from __future__ import annotations

import csv
import datetime as dt
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

DOW_LABELS = ("Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat")
SUM_TOL = 1e-9


class ValidationError(ValueError):
    """Raised when input data violates a type invariant.

    ``row`` is the 1-based data row (header excluded) when the problem is tied to one.
    """

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


def dow_label(day: dt.date) -> str:
    return DOW_LABELS[(day.weekday() + 1) % 7]


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# Case series
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CaseSeries:
    dates: tuple[dt.date, ...]
    counts: np.ndarray
    covariates: np.ndarray
    covariate_names: tuple[str, ...] = ()

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 1:
            raise ValidationError("counts must be one-dimensional")
        if np.any(counts < 0):
            row = int(np.argmax(counts < 0)) + 1
            raise ValidationError(f"negative count at row {row}", row)
        if not np.all(np.equal(np.mod(counts, 1), 0)):
            raise ValidationError("counts must be integers")
        n = counts.shape[0]
        cov = np.asarray(self.covariates, dtype=float)
        if cov.size == 0:
            cov = np.zeros((n, 0))
        if cov.ndim != 2 or cov.shape[0] != n:
            raise ValidationError(f"covariate matrix must have {n} rows")
        if not np.all(np.isfinite(cov)):
            raise ValidationError("missing or non-finite covariate value")
        if len(self.covariate_names) != cov.shape[1]:
            raise ValidationError("covariate_names does not match covariate columns")
        if len(self.dates) != n:
            raise ValidationError("one date per count is required")
        for i in range(1, n):
            if (self.dates[i] - self.dates[i - 1]).days != 1:
                raise ValidationError(f"date gap at row {i + 1}", i + 1)
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "counts", _frozen(counts, np.int64))
        object.__setattr__(self, "covariates", _frozen(cov))
        object.__setattr__(self, "covariate_names", tuple(self.covariate_names))

    @property
    def n(self) -> int:
        return int(self.counts.shape[0])

    @property
    def day_index(self) -> np.ndarray:
        return np.arange(1, self.n + 1)

    @property
    def dow(self) -> tuple[str, ...]:
        return tuple(dow_label(d) for d in self.dates)

    def design_matrix(self) -> np.ndarray:
        """Covariates with a leading intercept column."""
        return np.column_stack([np.ones(self.n), self.covariates])

    def with_counts(self, counts) -> "CaseSeries":
        return CaseSeries(self.dates, np.asarray(counts), self.covariates, self.covariate_names)

    def __eq__(self, other):
        if not isinstance(other, CaseSeries):
            return NotImplemented
        return (
            self.dates == other.dates
            and self.covariate_names == other.covariate_names
            and np.array_equal(self.counts, other.counts)
            and np.array_equal(self.covariates, other.covariates)
        )

    @classmethod
    def from_counts(cls, counts, start: dt.date | str = "2020-03-04", covariates=None,
                    covariate_names: Sequence[str] | None = None) -> "CaseSeries":
        if isinstance(start, str):
            start = dt.date.fromisoformat(start)
        counts = np.asarray(counts)
        dates = tuple(start + dt.timedelta(days=i) for i in range(len(counts)))
        if covariates is None:
            covariates = np.zeros((len(counts), 0))
        covariates = np.asarray(covariates, dtype=float)
        if covariates.ndim == 1:
            covariates = covariates[:, None]
        if covariate_names is None:
            covariate_names = tuple(f"x{j + 1}" for j in range(covariates.shape[1]))
        return cls(dates, counts, covariates, tuple(covariate_names))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["date", "cases", *self.covariate_names])
        for i in range(self.n):
            w.writerow([self.dates[i].isoformat(), int(self.counts[i]),
                        *(repr(float(v)) for v in self.covariates[i])])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CaseSeries":
        lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
        reader = csv.DictReader(lines)
        return validate_case_series(list(reader))


def validate_case_series(rows: Iterable[Mapping[str, str]],
                         covariate_names: Sequence[str] | None = None) -> CaseSeries:
    """Build a CaseSeries from parsed CSV rows, naming the first offending row on failure.

    Rows need ``date`` and ``cases`` keys. An optional ``dow`` key is checked
    against the date. Any other key is a covariate unless ``covariate_names``
    restricts the set.
    """
    rows = list(rows)
    if not rows:
        raise ValidationError("no rows")
    if covariate_names is None:
        covariate_names = [k for k in rows[0].keys() if k not in ("date", "cases", "dow")]
    dates, counts, cov = [], [], []
    for i, row in enumerate(rows, start=1):
        try:
            day = dt.date.fromisoformat(str(row["date"]).strip())
        except (KeyError, ValueError):
            raise ValidationError(f"invalid date at row {i}", i) from None
        try:
            c = float(row["cases"])
        except (KeyError, TypeError, ValueError):
            raise ValidationError(f"non-numeric count at row {i}", i) from None
        if c < 0:
            raise ValidationError(f"negative count at row {i}", i)
        if c != math.floor(c):
            raise ValidationError(f"non-integer count at row {i}", i)
        if "dow" in row and row["dow"] not in (None, ""):
            if str(row["dow"]).strip()[:3].title() != dow_label(day):
                raise ValidationError(f"date/dow mismatch at row {i}", i)
        if dates and (day - dates[-1]).days != 1:
            raise ValidationError(f"date gap at row {i} (after {dates[-1].isoformat()})", i)
        vals = []
        for name in covariate_names:
            raw = row.get(name)
            try:
                v = float(raw)
            except (TypeError, ValueError):
                raise ValidationError(f"non-numeric covariate '{name}' at row {i}", i) from None
            if not math.isfinite(v):
                raise ValidationError(f"non-numeric covariate '{name}' at row {i}", i)
            vals.append(v)
        dates.append(day)
        counts.append(int(c))
        cov.append(vals)
    cov_arr = np.array(cov, dtype=float).reshape(len(rows), len(covariate_names))
    return CaseSeries(tuple(dates), np.array(counts), cov_arr, tuple(covariate_names))


# ---------------------------------------------------------------------------
# Serial intervals
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SerialIntervalEstimate:
    """Probability mass over generation lags 1..S (index 0 holds lag 1)."""

    pmf: np.ndarray

    def __post_init__(self):
        pmf = np.asarray(self.pmf, dtype=float)
        if pmf.ndim != 1 or pmf.size == 0:
            raise ValidationError("pmf must be a non-empty vector")
        if np.any(pmf < 0) or not np.all(np.isfinite(pmf)):
            raise ValidationError("pmf entries must be finite and non-negative")
        if abs(pmf.sum() - 1.0) > SUM_TOL:
            raise ValidationError(f"pmf sums to {pmf.sum()!r}, not 1")
        object.__setattr__(self, "pmf", _frozen(pmf))

    @property
    def max_lag(self) -> int:
        return int(self.pmf.size)

    @property
    def lags(self) -> np.ndarray:
        return np.arange(1, self.max_lag + 1)

    def padded(self, max_lag: int) -> np.ndarray:
        out = np.zeros(max_lag)
        out[: self.max_lag] = self.pmf
        return out

    def __eq__(self, other):
        if not isinstance(other, SerialIntervalEstimate):
            return NotImplemented
        return np.array_equal(self.pmf, other.pmf)

    def to_json(self) -> str:
        return json.dumps({"lags": self.lags.tolist(), "pmf": self.pmf.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "SerialIntervalEstimate":
        obj = json.loads(text)
        return normalize_to_support(obj["pmf"], obj.get("lags"))


def normalize_to_support(pmf, lags=None) -> SerialIntervalEstimate:
    """Drop mass at lags <= 0 and renormalize what remains over lags 1..S.

    ``lags`` defaults to 1..len(pmf). Gaps in the positive lags are zero-filled.
    An input that already lives on 1..S and sums to one comes back unchanged.
    """
    pmf = np.asarray(pmf, dtype=float)
    if lags is None:
        lags = np.arange(1, pmf.size + 1)
    lags = np.asarray(lags, dtype=int)
    if lags.shape != pmf.shape:
        raise ValidationError("lags and pmf differ in length")
    if np.any(pmf < 0) or not np.all(np.isfinite(pmf)):
        raise ValidationError("pmf entries must be finite and non-negative")
    pos = lags >= 1
    if not np.any(pos) or pmf[pos].sum() <= 0:
        raise ValidationError("no positive support")
    out = np.zeros(int(lags[pos].max()))
    np.add.at(out, lags[pos] - 1, pmf[pos])
    total = out.sum()
    if abs(total - 1.0) > SUM_TOL:
        out = out / total
    return SerialIntervalEstimate(out)


@dataclass(frozen=True, eq=False)
class SerialMixture:
    components: tuple[SerialIntervalEstimate, ...]
    weights: np.ndarray

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValidationError("a mixture needs at least one component")
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(comps),):
            raise ValidationError("one weight per component is required")
        if np.any(w < 0) or abs(w.sum() - 1.0) > SUM_TOL:
            raise ValidationError("weights must lie on the simplex")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "weights", _frozen(w))

    @property
    def max_lag(self) -> int:
        return max(c.max_lag for c in self.components)

    def matrix(self) -> np.ndarray:
        """Components stacked as a (K, S*) array, zero-padded to the longest support."""
        s = self.max_lag
        return np.vstack([c.padded(s) for c in self.components])

    @property
    def wstar(self) -> SerialIntervalEstimate:
        return SerialIntervalEstimate(self.weights @ self.matrix())

    @classmethod
    def single(cls, component: SerialIntervalEstimate) -> "SerialMixture":
        return cls((component,), np.ones(1))


def component_matrix(components: Sequence[SerialIntervalEstimate]) -> np.ndarray:
    return SerialMixture(tuple(components), np.full(len(components), 1.0 / len(components))).matrix()


# ---------------------------------------------------------------------------
# Reporting model
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ReportingModel:
    """Day-of-week to reporting-cluster mapping with per-cluster weights.

    ``tau`` maps each of the seven labels in DOW_LABELS to a cluster id in 1..K.
    """

    tau: Mapping[str, int]
    theta: np.ndarray
    mean_one_constrained: bool = True

    def __post_init__(self):
        tau = {str(k): int(v) for k, v in dict(self.tau).items()}
        if sorted(tau) != sorted(DOW_LABELS):
            raise ValidationError("tau must map every day of the week exactly once")
        ids = sorted(set(tau.values()))
        if ids != list(range(1, len(ids) + 1)):
            raise ValidationError("cluster ids must be contiguous from 1")
        theta = np.asarray(self.theta, dtype=float)
        if theta.shape != (len(ids),):
            raise ValidationError(f"theta needs {len(ids)} entries")
        if np.any(theta <= 0) or not np.all(np.isfinite(theta)):
            raise ValidationError("theta entries must be positive")
        if self.mean_one_constrained and abs(theta.mean() - 1.0) > SUM_TOL:
            raise ValidationError(f"theta mean is {theta.mean()!r}, not 1")
        object.__setattr__(self, "tau", {d: tau[d] for d in DOW_LABELS})
        object.__setattr__(self, "theta", _frozen(theta))

    @property
    def n_clusters(self) -> int:
        return int(self.theta.size)

    def cluster_index(self, dates: Sequence[dt.date]) -> np.ndarray:
        """0-based cluster index for every date."""
        return np.array([self.tau[dow_label(d)] - 1 for d in dates], dtype=np.int64)

    def labels(self) -> tuple[int, ...]:
        return tuple(self.tau[d] for d in DOW_LABELS)

    def __eq__(self, other):
        if not isinstance(other, ReportingModel):
            return NotImplemented
        return (self.tau == other.tau and np.array_equal(self.theta, other.theta)
                and self.mean_one_constrained == other.mean_one_constrained)

    @classmethod
    def single_cluster(cls) -> "ReportingModel":
        return cls({d: 1 for d in DOW_LABELS}, np.ones(1))

    @classmethod
    def from_groups(cls, groups: Sequence[Sequence[str]], theta=None,
                    mean_one_constrained: bool = True) -> "ReportingModel":
        tau = {d: k + 1 for k, g in enumerate(groups) for d in g}
        if theta is None:
            theta = np.ones(len(groups))
        return cls(tau, theta, mean_one_constrained)

    def to_dict(self) -> dict:
        return {"clusters": dict(self.tau), "theta": self.theta.tolist(),
                "mean_one_constrained": self.mean_one_constrained}

    @classmethod
    def from_dict(cls, obj: Mapping) -> "ReportingModel":
        theta = obj.get("theta", obj.get("theta_prior"))
        return cls(obj["clusters"], theta, obj.get("mean_one_constrained", True))


# ---------------------------------------------------------------------------
# Transmission parameters and latent state
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GarmaParams:
    beta: np.ndarray
    phi: np.ndarray
    sigma_r: float

    def __post_init__(self):
        beta = np.atleast_1d(np.asarray(self.beta, dtype=float))
        phi = np.atleast_1d(np.asarray(self.phi, dtype=float)) if np.size(self.phi) else np.zeros(0)
        if not self.sigma_r > 0:
            raise ValidationError("sigma_r must be positive")
        object.__setattr__(self, "beta", _frozen(beta))
        object.__setattr__(self, "phi", _frozen(phi))
        object.__setattr__(self, "sigma_r", float(self.sigma_r))

    @property
    def ar_order(self) -> int:
        return int(self.phi.size)

    def __eq__(self, other):
        if not isinstance(other, GarmaParams):
            return NotImplemented
        return (np.array_equal(self.beta, other.beta) and np.array_equal(self.phi, other.phi)
                and self.sigma_r == other.sigma_r)

    def to_dict(self) -> dict:
        return {"beta": self.beta.tolist(), "phi": self.phi.tolist(), "sigma_r": self.sigma_r}

    @classmethod
    def from_dict(cls, obj: Mapping) -> "GarmaParams":
        return cls(obj["beta"], obj["phi"], obj["sigma_r"])


@dataclass(frozen=True, eq=False)
class LatentState:
    istar: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        istar = np.asarray(self.istar)
        r = np.asarray(self.r, dtype=float)
        if istar.shape != r.shape or istar.ndim != 1:
            raise ValidationError("istar and r must be aligned vectors")
        if np.any(istar < 0) or not np.all(np.equal(np.mod(istar, 1), 0)):
            raise ValidationError("latent cases must be non-negative integers")
        if np.any(r <= 0):
            raise ValidationError("R_t must be positive")
        object.__setattr__(self, "istar", _frozen(istar, np.int64))
        object.__setattr__(self, "r", _frozen(r))

    def __eq__(self, other):
        if not isinstance(other, LatentState):
            return NotImplemented
        return np.array_equal(self.istar, other.istar) and np.array_equal(self.r, other.r)

    def to_dict(self) -> dict:
        return {"istar": self.istar.tolist(), "r": self.r.tolist()}

    @classmethod
    def from_dict(cls, obj: Mapping) -> "LatentState":
        return cls(obj["istar"], obj["r"])


@dataclass(frozen=True, eq=False)
class PosteriorDraws:
    """Kept MCMC draws, each array indexed (chain, iteration, ...)."""

    theta: np.ndarray
    lam: np.ndarray
    beta: np.ndarray
    phi: np.ndarray
    sigma_r: np.ndarray
    istar: np.ndarray
    r: np.ndarray
    rng_seed: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("theta", "lam", "beta", "phi", "sigma_r", "istar", "r"):
            arr = np.asarray(getattr(self, name))
            object.__setattr__(self, name, _frozen(arr, arr.dtype))
        c, m = self.r.shape[:2]
        for name in ("theta", "lam", "beta", "phi", "sigma_r", "istar"):
            if getattr(self, name).shape[:2] != (c, m):
                raise ValidationError(f"{name} draws are not aligned with r")

    @property
    def chains(self) -> int:
        return int(self.r.shape[0])

    @property
    def iterations_kept(self) -> int:
        return int(self.r.shape[1])

    def scalar_draws(self) -> dict[str, np.ndarray]:
        """Every scalar parameter as a (chain, iteration) array, keyed by a flat name."""
        out = {}
        for name in ("theta", "lam", "beta", "phi"):
            arr = getattr(self, name)
            for j in range(arr.shape[2]):
                out[f"{name}[{j + 1}]"] = arr[:, :, j]
        out["sigma_r"] = self.sigma_r
        for t in range(self.r.shape[2]):
            out[f"r[{t + 1}]"] = self.r[:, :, t]
        for t in range(self.istar.shape[2]):
            out[f"istar[{t + 1}]"] = self.istar[:, :, t].astype(float)
        return out
