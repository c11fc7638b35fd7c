"""Predictive validation: compare measured runs with simulated runs.

Each side is a list of runs, each run a sequence of response times in
milliseconds with warmup already trimmed. The comparison pools runs for the
shape statistics (moments, ECDF, KS distance, mean difference) and keeps them
separate for the percentile confidence intervals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from . import stats
from .errors import InputError
from .stats import Ecdf, Interval, Moments

SOURCES = ("measured", "simulated")
PERCENTILE_ROWS = (50.0, 95.0, 99.0, 99.9)
DEFAULT_SKEW_TOL = 0.5
DEFAULT_KURT_REL_TOL = 0.25

SHAPE_VALID = "shape-valid"
SHAPE_DIVERGENT = "shape-divergent"


@dataclass(frozen=True)
class Verdict:
    checks: Dict[str, bool]

    @property
    def shape_valid(self) -> bool:
        return all(self.checks.values())

    @property
    def label(self) -> str:
        return SHAPE_VALID if self.shape_valid else SHAPE_DIVERGENT


@dataclass(frozen=True)
class PercentileRow:
    percentile: float
    measured: Interval
    simulated: Interval


@dataclass
class ValidationReport:
    moments: Dict[str, Moments]
    percentiles: list
    mean_difference: Interval
    ks_distance: float
    ecdf: Dict[str, Ecdf]
    verdict: Verdict
    metadata: dict = field(default_factory=dict)

    @property
    def cullen_frey(self) -> Dict[str, tuple]:
        return {src: m.cullen_frey for src, m in self.moments.items()}


def ks_distance(a: Ecdf, b: Ecdf) -> float:
    """Largest vertical gap between two ECDFs, taken over all jump points."""
    grid = np.union1d(a.x, b.x)
    return float(np.max(np.abs(a(grid) - b(grid))))


def shape_verdict(m: Moments, s: Moments, skew_tol: float = DEFAULT_SKEW_TOL,
                  kurt_rel_tol: float = DEFAULT_KURT_REL_TOL) -> Verdict:
    """Skewness within an absolute tolerance, kurtosis within a relative one.

    The relative kurtosis gap is normalised by the measured kurtosis.
    """
    for mom in (m, s):
        if mom is None or not (np.isfinite(mom.skewness) and np.isfinite(mom.kurtosis)):
            raise InputError("shape verdict needs defined skewness and kurtosis")
    if m.kurtosis <= 0:
        raise InputError("measured kurtosis must be > 0")
    return Verdict({
        "skewness": abs(m.skewness - s.skewness) <= skew_tol,
        "kurtosis": abs(m.kurtosis - s.kurtosis) / m.kurtosis <= kurt_rel_tol,
    })


def _pool(runs: Sequence) -> np.ndarray:
    return np.concatenate([np.asarray(r, dtype=float) for r in runs])


def compare(measured_runs: Sequence, simulated_runs: Sequence, confidence: float = 0.95,
            skew_tol: float = DEFAULT_SKEW_TOL, kurt_rel_tol: float = DEFAULT_KURT_REL_TOL,
            ks_tol: Optional[float] = None, percentiles: Sequence[float] = PERCENTILE_ROWS,
            seed: int = 0, metadata: Optional[dict] = None) -> ValidationReport:
    """Build a :class:`ValidationReport` for measured versus simulated runs.

    ``ks_tol`` enables an extra verdict check on the KS distance; it is off
    by default. Single-run sides get bootstrap percentile intervals seeded
    with ``seed``.
    """
    sides = {"measured": list(measured_runs), "simulated": list(simulated_runs)}
    for name, runs in sides.items():
        if not runs or any(len(r) == 0 for r in runs):
            raise InputError(f"{name} side has no data")
    pooled = {name: _pool(runs) for name, runs in sides.items()}
    mom = {name: stats.moments(v) for name, v in pooled.items()}
    ecdfs = {name: stats.ecdf(v) for name, v in pooled.items()}
    rows = [
        PercentileRow(float(p),
                      stats.percentile_ci(sides["measured"], p, confidence, seed),
                      stats.percentile_ci(sides["simulated"], p, confidence, seed))
        for p in percentiles
    ]
    ks = ks_distance(ecdfs["measured"], ecdfs["simulated"])
    verdict = shape_verdict(mom["measured"], mom["simulated"], skew_tol, kurt_rel_tol)
    if ks_tol is not None:
        verdict = Verdict({**verdict.checks, "ks": ks <= ks_tol})
    meta = {
        "confidence": confidence,
        "skew_tol": skew_tol,
        "kurt_rel_tol": kurt_rel_tol,
        "ks_tol": ks_tol,
        "bootstrap_seed": seed,
        "runs": {name: len(runs) for name, runs in sides.items()},
    }
    meta.update(metadata or {})
    return ValidationReport(
        moments=mom,
        percentiles=rows,
        mean_difference=stats.mean_difference_interval(pooled["measured"], pooled["simulated"],
                                                       confidence),
        ks_distance=ks,
        ecdf=ecdfs,
        verdict=verdict,
        metadata=meta,
    )


def format_interval(iv: Interval) -> str:
    return f"[{iv.lower:.2f}, {iv.upper:.2f}]"


def format_percentile_label(p: float) -> str:
    return f"{p:g}th"


def percentile_table(report: ValidationReport, sep: str = "\t") -> str:
    """Percentile rows as delimited text, intervals in milliseconds to 2 decimals."""
    lines = [sep.join(["percentile", "measured_ms", "simulated_ms"])]
    for row in report.percentiles:
        lines.append(sep.join([format_percentile_label(row.percentile),
                               format_interval(row.measured), format_interval(row.simulated)]))
    return "\n".join(lines) + "\n"


def summary_text(report: ValidationReport) -> str:
    md = report.mean_difference
    lines = [percentile_table(report).rstrip("\n"),
             f"mean difference (measured - simulated): {format_interval(md)} ms",
             f"ks distance: {report.ks_distance:.4f}"]
    for src, m in report.moments.items():
        lines.append(f"{src}: skewness {m.skewness:.4f} kurtosis {m.kurtosis:.4f} n {m.n}")
    checks = " ".join(f"{k}={'pass' if v else 'fail'}" for k, v in report.verdict.checks.items())
    lines.append(f"verdict: {report.verdict.label} ({checks})")
    return "\n".join(lines) + "\n"
