"""Estimators with Monte Carlo error bars and the testable limit claims.

Everything here consumes replicated trajectory values of shape
(replicas, coords, times) — finite-N ensembles and limit-sampler paths look
identical to the estimators.  All estimators are deterministic given the
ensemble and permutation-invariant over replicas.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .errors import DomainError
from .limits import increment_cov


@dataclass(frozen=True)
class MomentEstimate:
    """A Monte Carlo estimate with its standard error."""

    value: float
    std_error: float
    n_replicas: int
    order: int = 1

    def within(self, target: float, n_se: float, extra: float = 0.0) -> bool:
        return abs(self.value - target) <= n_se * self.std_error + extra


@dataclass
class TestReport:
    """Outcome of one statistical check, JSON-serializable."""

    name: str
    statistic: float
    threshold: float
    passed: bool
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "name": self.name,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "passed": self.passed,
            "metadata": self.metadata,
        }
        return json.dumps(payload, sort_keys=True)


def _series(ensemble, coord: int, time: float) -> np.ndarray:
    coords = list(ensemble.coords)
    if coord not in coords:
        raise DomainError(f"coordinate {coord} is not tracked (have {coords})")
    times = np.asarray(ensemble.times)
    hits = np.nonzero(np.isclose(times, time, rtol=0.0, atol=1e-12))[0]
    if len(hits) != 1:
        raise DomainError(f"time {time} is not on the grid {times}")
    return ensemble.values[:, coords.index(coord), hits[0]]


def estimate_moment(ensemble, coord: int, time: float, order: int) -> MomentEstimate:
    """Sample mean of value^order across replicas, with its standard error."""
    if order < 1:
        raise DomainError(f"moment order must be >= 1, got {order}")
    x = _series(ensemble, coord, time) ** order
    r = len(x)
    if r < 2:
        raise DomainError("standard errors need at least two replicas")
    return MomentEstimate(
        value=float(x.mean()),
        std_error=float(x.std(ddof=1) / math.sqrt(r)),
        n_replicas=r,
        order=order,
    )


def _jackknife_cov(x: np.ndarray, y: np.ndarray) -> MomentEstimate:
    """Sample covariance (ddof=1) with leave-one-out jackknife standard error."""
    r = len(x)
    if r < 3:
        raise DomainError("jackknife covariance needs at least three replicas")
    sx, sy, sxy = x.sum(), y.sum(), (x * y).sum()
    full = (sxy - sx * sy / r) / (r - 1)
    m = r - 1
    loo = ((sxy - x * y) - (sx - x) * (sy - y) / m) / (m - 1)
    se = math.sqrt((r - 1) / r * np.sum((loo - loo.mean()) ** 2))
    return MomentEstimate(value=float(full), std_error=float(se), n_replicas=r, order=2)


def estimate_cov(ensemble, coord: int, s: float, t: float) -> MomentEstimate:
    """Covariance of one coordinate between two grid times, across replicas."""
    return _jackknife_cov(_series(ensemble, coord, s), _series(ensemble, coord, t))


def cross_cov(ensemble, coord_a: int, coord_b: int, time: float) -> MomentEstimate:
    """Covariance of two coordinates at one time, across replicas."""
    return _jackknife_cov(_series(ensemble, coord_a, time), _series(ensemble, coord_b, time))


def cross_corr(ensemble, coord_a: int, coord_b: int, time: float) -> MomentEstimate:
    """Correlation of two coordinates at one time, with jackknife standard error."""
    x = _series(ensemble, coord_a, time)
    y = _series(ensemble, coord_b, time)
    r = len(x)
    if r < 3:
        raise DomainError("jackknife correlation needs at least three replicas")

    def corr(sx, sy, sxy, sxx, syy, m):
        cov = sxy - sx * sy / m
        vx = sxx - sx**2 / m
        vy = syy - sy**2 / m
        return cov / math.sqrt(vx * vy)

    sx, sy = x.sum(), y.sum()
    sxy, sxx, syy = (x * y).sum(), (x * x).sum(), (y * y).sum()
    full = corr(sx, sy, sxy, sxx, syy, r)
    m = r - 1
    cov_i = (sxy - x * y) - (sx - x) * (sy - y) / m
    vx_i = (sxx - x * x) - (sx - x) ** 2 / m
    vy_i = (syy - y * y) - (sy - y) ** 2 / m
    loo = cov_i / np.sqrt(vx_i * vy_i)
    se = math.sqrt((r - 1) / r * np.sum((loo - loo.mean()) ** 2))
    return MomentEstimate(value=float(full), std_error=float(se), n_replicas=r, order=2)


def ks_gaussian(samples, variance: float, alpha: float = 1e-3) -> TestReport:
    """Kolmogorov-Smirnov test of the samples against N(0, variance).

    Passes iff the asymptotic p-value is at least alpha.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if variance <= 0:
        raise DomainError(f"reference variance must be positive, got {variance}")
    if len(samples) < 10:
        raise DomainError("KS test needs at least 10 samples")
    result = sps.kstest(samples, "norm", args=(0.0, math.sqrt(variance)), mode="asymp")
    return TestReport(
        name="ks_gaussian",
        statistic=float(result.pvalue),
        threshold=alpha,
        passed=bool(result.pvalue >= alpha),
        metadata={
            "ks_distance": float(result.statistic),
            "n_samples": int(len(samples)),
            "variance": float(variance),
        },
    )


@dataclass(frozen=True)
class IncrementReport:
    """Empirical vs. theoretical covariance of two path increments."""

    empirical: MomentEstimate
    theoretical: float
    times: tuple


def increment_correlation(
    ensemble, coord: int, t1: float, t2: float, t3: float, t4: float, cov
) -> IncrementReport:
    """Cov[X(t2)-X(t1), X(t4)-X(t3)] measured on paths and predicted from ``cov``."""
    if not (t1 <= t2 <= t3 <= t4):
        raise DomainError(f"need t1 <= t2 <= t3 <= t4, got {(t1, t2, t3, t4)}")
    a = _series(ensemble, coord, t2) - _series(ensemble, coord, t1)
    b = _series(ensemble, coord, t4) - _series(ensemble, coord, t3)
    if t1 == t2 or t3 == t4:
        empirical = MomentEstimate(0.0, 0.0, len(a), order=2)
    else:
        empirical = _jackknife_cov(a, b)
    return IncrementReport(
        empirical=empirical,
        theoretical=increment_cov(t1, t2, t3, t4, cov),
        times=(t1, t2, t3, t4),
    )


def growth_slope(times, variances, window: tuple) -> float:
    """Least-squares slope of log(variance) over the times inside ``window``."""
    times = np.asarray(times, dtype=np.float64)
    variances = np.asarray(variances, dtype=np.float64)
    lo, hi = window
    mask = (times >= lo) & (times <= hi)
    if mask.sum() < 2:
        raise DomainError(f"window {window} selects fewer than two grid times")
    if np.any(variances[mask] <= 0):
        raise DomainError("variances must be positive inside the fit window")
    slope, _ = np.polyfit(times[mask], np.log(variances[mask]), 1)
    return float(slope)
