"""Statistics for response-time samples (milliseconds).

Conventions
-----------
* ECDF is right-continuous: ``F(x) = #{v <= x} / n``.
* Percentiles use linear interpolation between order statistics (Hyndman &
  Fan type 7): with sorted values ``x[0..n-1]`` and ``h = (n - 1) * p / 100``,
  ``Q(p) = x[floor(h)] + (h - floor(h)) * (x[floor(h) + 1] - x[floor(h)])``.
* Skewness and kurtosis are the biased population estimators
  ``g1 = m3 / m2**1.5`` and ``b2 = m4 / m2**2`` (normal -> 0 and 3), the
  coordinates a Cullen and Frey graph plots as ``(g1**2, b2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy import stats as sps

from .errors import DegenerateSampleError, InputError, ParameterError

BOOTSTRAP_RESAMPLES = 1000


def _as_sample(values) -> np.ndarray:
    a = np.asarray(values, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise InputError("sample must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(a)):
        raise InputError("sample contains non-finite values")
    return a


def warmup_count(n: int, fraction: float) -> int:
    """Number of leading observations dropped from ``n`` at ``fraction``.

    ``ceil(fraction * n)`` computed on the decimal value of ``fraction`` so
    0.05 * 5000 is exactly 250, capped at ``n - 1`` so the last observation
    always survives.
    """
    if not 0 <= fraction < 1:
        raise ParameterError(f"warmup fraction must be in [0, 1), got {fraction}")
    if n <= 0:
        return 0
    drop = math.ceil(Fraction(repr(float(fraction))) * n)
    return min(drop, n - 1)


def trim_warmup(records: Sequence, fraction: float) -> list:
    return list(records[warmup_count(len(records), fraction):])


@dataclass(frozen=True)
class Ecdf:
    x: np.ndarray
    p: np.ndarray
    n: int

    def __call__(self, value) -> np.ndarray | float:
        idx = np.searchsorted(self.x, value, side="right")
        out = np.where(idx > 0, self.p[np.maximum(idx - 1, 0)], 0.0)
        return float(out) if np.ndim(out) == 0 else out


def ecdf(values) -> Ecdf:
    a = np.sort(_as_sample(values))
    x, counts = np.unique(a, return_counts=True)
    cum = np.cumsum(counts)
    p = cum / a.size
    p[-1] = 1.0
    return Ecdf(x, p, int(a.size))


def _percentile_sorted(s: np.ndarray, p: float) -> float:
    h = (s.size - 1) * p / 100.0
    lo = int(math.floor(h))
    if lo >= s.size - 1:
        return float(s[-1])
    frac = h - lo
    return float(s[lo] + frac * (s[lo + 1] - s[lo]))


def percentile(values, p: float) -> float:
    if not 0 <= p <= 100:
        raise ParameterError(f"percentile must be in [0, 100], got {p}")
    return _percentile_sorted(np.sort(_as_sample(values)), p)


@dataclass(frozen=True)
class Moments:
    mean: float
    median: float
    skewness: float
    kurtosis: float
    n: int

    @property
    def cullen_frey(self) -> tuple:
        """``(skewness**2, kurtosis)``."""
        return (self.skewness ** 2, self.kurtosis)


def moments(values) -> Moments:
    a = _as_sample(values)
    if a.size < 2:
        raise InputError("moments need at least 2 observations")
    if np.all(a == a[0]):
        raise DegenerateSampleError("zero variance: skewness and kurtosis undefined")
    mean = float(a.mean())
    d = a - mean
    m2 = float(np.mean(d ** 2))
    if m2 <= 0:
        raise DegenerateSampleError("zero variance: skewness and kurtosis undefined")
    m3 = float(np.mean(d ** 3))
    m4 = float(np.mean(d ** 4))
    return Moments(
        mean=mean,
        median=percentile(a, 50),
        skewness=m3 / m2 ** 1.5,
        kurtosis=m4 / m2 ** 2,
        n=int(a.size),
    )


@dataclass(frozen=True)
class Interval:
    lower: float
    upper: float
    confidence: float
    method: str = "t"
    point: Optional[float] = None

    def __post_init__(self):
        if self.lower > self.upper:
            raise InputError(f"interval lower {self.lower} > upper {self.upper}")


def _check_confidence(confidence: float) -> None:
    if not 0 < confidence < 1:
        raise ParameterError(f"confidence must be in (0, 1), got {confidence}")


def t_interval(values, confidence: float) -> Interval:
    """Student-t interval for the mean of ``values`` (at least 2 of them)."""
    _check_confidence(confidence)
    a = _as_sample(values)
    if a.size < 2:
        raise InputError("a t-interval needs at least 2 values")
    if np.all(a == a[0]):
        v = float(a[0])
        return Interval(v, v, confidence, "t", v)
    mean = float(a.mean())
    sd = float(a.std(ddof=1))
    half = float(sps.t.ppf((1 + confidence) / 2, a.size - 1)) * sd / math.sqrt(a.size)
    return Interval(mean - half, mean + half, confidence, "t", mean)


def bootstrap_percentile_interval(values, p: float, confidence: float,
                                  seed: int = 0, resamples: int = BOOTSTRAP_RESAMPLES) -> Interval:
    """Percentile-bootstrap interval for the ``p``-th percentile of one sample."""
    _check_confidence(confidence)
    a = _as_sample(values)
    rng = np.random.Generator(np.random.PCG64(seed))
    stats = np.sort(np.array([
        _percentile_sorted(np.sort(a[rng.integers(0, a.size, size=a.size)]), p)
        for _ in range(resamples)
    ]))
    alpha = (1 - confidence) / 2
    return Interval(_percentile_sorted(stats, 100 * alpha),
                    _percentile_sorted(stats, 100 * (1 - alpha)),
                    confidence, "bootstrap", percentile(a, p))


def percentile_ci(runs: Sequence, p: float, confidence: float = 0.95, seed: int = 0) -> Interval:
    """Confidence interval for the ``p``-th percentile across independent runs.

    With two or more runs the per-run percentiles get a Student-t interval
    centred on their mean. A single run falls back to a seeded percentile
    bootstrap; ``Interval.method`` says which was used.
    """
    if len(runs) == 0:
        raise InputError("percentile_ci needs at least one run")
    if not 0 <= p <= 100:
        raise ParameterError(f"percentile must be in [0, 100], got {p}")
    if len(runs) == 1:
        return bootstrap_percentile_interval(runs[0], p, confidence, seed)
    per_run = [percentile(r, p) for r in runs]
    return t_interval(per_run, confidence)


def mean_difference_interval(a, b, confidence: float = 0.95) -> Interval:
    """Welch interval for ``mean(a) - mean(b)``."""
    _check_confidence(confidence)
    a = _as_sample(a)
    b = _as_sample(b)
    if a.size < 2 or b.size < 2:
        raise InputError("each side needs at least 2 observations")
    va = float(a.var(ddof=1)) / a.size
    vb = float(b.var(ddof=1)) / b.size
    diff = float(a.mean() - b.mean())
    se = math.sqrt(va + vb)
    if se == 0:
        return Interval(diff, diff, confidence, "welch", diff)
    dof = (va + vb) ** 2 / (va ** 2 / (a.size - 1) + vb ** 2 / (b.size - 1))
    half = float(sps.t.ppf((1 + confidence) / 2, dof)) * se
    return Interval(diff - half, diff + half, confidence, "welch", diff)
