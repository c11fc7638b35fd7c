"""Workload generation: arrival schedules and synthetic trace fixtures.

All randomness comes from numpy's ``PCG64`` bit generator seeded with a
non-negative 64-bit integer, so schedules and traces are reproducible across
platforms and numpy versions that keep the PCG64 stream stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import pdtr

from .errors import ParameterError
from .traces import TraceEntry, TraceFile

ARRIVAL_KINDS = ("poisson", "exponential", "closed-loop")

US_PER_MS = 1000


def make_rng(seed: int) -> np.random.Generator:
    if seed < 0 or seed >= 2**64:
        raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class ArrivalModel:
    kind: str = "poisson"
    lambda_ms: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ARRIVAL_KINDS:
            raise ParameterError(f"unknown arrival kind {self.kind!r}")
        if self.kind != "closed-loop":
            if self.lambda_ms is None or not self.lambda_ms > 0:
                raise ParameterError(
                    f"{self.kind} arrivals need lambda_ms > 0, got {self.lambda_ms}")


@dataclass(frozen=True)
class ArrivalSchedule:
    """Arrival times in microseconds, or the closed-loop marker.

    A closed-loop schedule carries no times: request ``i + 1`` arrives when
    request ``i`` completes, so only ``n`` is known up front.
    """

    n: int
    times: Optional[tuple] = None

    @property
    def closed_loop(self) -> bool:
        return self.times is None

    @classmethod
    def closed(cls, n: int) -> "ArrivalSchedule":
        if n < 1:
            raise ParameterError("n must be >= 1")
        return cls(n=n)

    @classmethod
    def from_times(cls, times: Sequence[int]) -> "ArrivalSchedule":
        times = tuple(int(t) for t in times)
        return cls(n=len(times), times=times)


def _check(mean_ms: float, n: int) -> None:
    if not mean_ms > 0 or math.isinf(mean_ms):
        raise ParameterError(f"mean inter-arrival must be finite and > 0, got {mean_ms}")
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")


def _cumulative(gaps_us: Sequence[int]) -> ArrivalSchedule:
    times = [0]
    t = 0
    for g in gaps_us:
        t += g
        times.append(t)
    return ArrivalSchedule(n=len(times), times=tuple(times))


def poisson_variate(lam: float, u: float) -> int:
    """Invert the Poisson(lam) CDF at ``u``.

    The search starts at the mode and walks down or up using pmf ratios, so
    it costs O(sqrt(lam)) steps and never evaluates ``exp(-lam)`` directly
    (which underflows for lam > ~700).
    """
    k = int(math.floor(lam))
    cdf = float(pdtr(k, lam))
    pmf = math.exp(-lam + k * math.log(lam) - math.lgamma(k + 1)) if k > 0 else math.exp(-lam)
    if u <= cdf:
        # smallest k with F(k) >= u: step down while F(k-1) >= u
        while k > 0:
            prev_cdf = cdf - pmf
            if prev_cdf < u:
                break
            pmf *= k / lam
            cdf = prev_cdf
            k -= 1
        return k
    while cdf < u:
        k += 1
        pmf *= lam / k
        if pmf == 0.0:
            break
        cdf += pmf
    return k


def poisson_interarrivals(lambda_ms: float, n: int, seed: int) -> ArrivalSchedule:
    """Open-loop schedule whose gaps are Poisson(lambda_ms) whole milliseconds.

    The first arrival is at time 0; ``n - 1`` gaps are drawn.
    """
    _check(lambda_ms, n)
    rng = make_rng(seed)
    us = rng.random(n - 1)
    gaps = [poisson_variate(lambda_ms, float(u)) * US_PER_MS for u in us]
    return _cumulative(gaps)


def exponential_interarrivals(mean_ms: float, n: int, seed: int) -> ArrivalSchedule:
    """Open-loop schedule with exponential gaps rounded to whole microseconds."""
    _check(mean_ms, n)
    rng = make_rng(seed)
    draws = rng.standard_exponential(n - 1) * (mean_ms * US_PER_MS)
    return _cumulative([int(round(float(d))) for d in draws])


def build_schedule(model: ArrivalModel, n: int, seed: int) -> ArrivalSchedule:
    if model.kind == "closed-loop":
        return ArrivalSchedule.closed(n)
    if model.kind == "poisson":
        return poisson_interarrivals(model.lambda_ms, n, seed)
    return exponential_interarrivals(model.lambda_ms, n, seed)


def synth_trace(n_entries: int, cold_duration_ms: float, warm_mean_ms: float,
                warm_dispersion: float, seed: int, trace_id: str = "synthetic") -> TraceFile:
    """Synthetic replica trace: one cold-start entry followed by log-normal warm entries.

    ``warm_dispersion`` is the coefficient of variation (std / mean) of the
    warm durations. Durations are rounded to whole microseconds and clamped
    to at least 1 us. Every status code is 200.
    """
    if n_entries < 2:
        raise ParameterError(f"a trace needs at least 2 entries, got {n_entries}")
    if not cold_duration_ms > 0 or not warm_mean_ms > 0:
        raise ParameterError("durations must be > 0")
    if warm_dispersion < 0:
        raise ParameterError("dispersion must be >= 0")
    cold_us = int(round(cold_duration_ms * US_PER_MS))
    if cold_us < 1:
        raise ParameterError("cold duration rounds to 0 us")
    sigma2 = math.log1p(warm_dispersion ** 2)
    mu = math.log(warm_mean_ms) - sigma2 / 2
    rng = make_rng(seed)
    warm = rng.lognormal(mu, math.sqrt(sigma2), n_entries - 1) * US_PER_MS
    entries = [TraceEntry(cold_us, 200)]
    entries.extend(TraceEntry(max(1, int(round(float(w)))), 200) for w in warm)
    return TraceFile(trace_id, tuple(entries))
