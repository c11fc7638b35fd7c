"""Matplotlib figures for a validation report: ECDF overlay and Cullen and Frey graph."""

from __future__ import annotations

from pathlib import Path
from typing import List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .validation import ValidationReport  # noqa: E402

RC = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "lines.linewidth": 1.2,
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "svg.hashsalt": "faas-dessim",
}

STYLES = {
    "measured": dict(color="tab:red", linestyle=":"),
    "simulated": dict(color="tab:blue", linestyle="--"),
    "input": dict(color="tab:green", linestyle="-"),
}

# deterministic PNGs: drop the matplotlib version stamp
PNG_METADATA = {"Software": None}


def _percentile_from_ecdf(x, p, q):
    idx = int(np.searchsorted(p, q, side="left"))
    return float(x[min(idx, len(x) - 1)])


def plot_ecdf(report: ValidationReport, ax=None):
    if ax is None:
        _, ax = plt.subplots(figsize=(6, 4))
    for src, e in report.ecdf.items():
        style = STYLES.get(src, {})
        ax.step(e.x, e.p, where="post", label=src, **style)
        for q in (0.5, 0.999):
            ax.axvline(_percentile_from_ecdf(e.x, e.p, q), linewidth=0.8, alpha=0.6,
                       color=style.get("color"), linestyle=style.get("linestyle"))
    ax.set_xlabel("response time (ms)")
    ax.set_ylabel("ECDF")
    ax.set_ylim(0, 1.02)
    ax.legend(loc="lower right")
    return ax


def _lognormal_curve(n=200):
    s2 = np.linspace(1e-4, 1.0, n) ** 2
    w = np.exp(s2)
    g1 = (w + 2) * np.sqrt(w - 1)
    b2 = w ** 4 + 2 * w ** 3 + 3 * w ** 2 - 3
    return g1 ** 2, b2


def plot_cullen_frey(report: ValidationReport, ax=None):
    """Skewness squared against kurtosis with the usual reference families.

    Kurtosis grows downward, as in the common fitdistrplus rendering.
    """
    if ax is None:
        _, ax = plt.subplots(figsize=(5, 5))
    pts = report.cullen_frey
    xmax = max(4.5, 1.2 * max(g for g, _ in pts.values()))
    ymax = max(10.0, 1.2 * max(b for _, b in pts.values()))
    sq = np.linspace(0, xmax, 200)
    ax.fill_between(sq, sq + 1, 3 + 1.5 * sq, color="0.85", label="beta")
    ax.plot(sq, 3 + 1.5 * sq, color="k", linestyle="--", label="gamma")
    lx, ly = _lognormal_curve()
    ax.plot(lx, ly, color="k", linestyle=":", label="lognormal")
    refs = {"normal": (0, 3, "*"), "uniform": (0, 1.8, "^"), "exponential": (4, 9, "s"),
            "logistic": (0, 4.2, "+")}
    for name, (x, y, marker) in refs.items():
        ax.plot([x], [y], marker=marker, color="k", linestyle="none", label=name)
    for src, (g, b) in pts.items():
        ax.plot([g], [b], marker="o", linestyle="none", markersize=7,
                color=STYLES.get(src, {}).get("color"), label=f"{src} observation")
    ax.set_xlim(0, xmax)
    ax.set_ylim(ymax, 1)
    ax.set_xlabel("square of skewness")
    ax.set_ylabel("kurtosis")
    ax.legend(loc="lower right")
    return ax


def render_figures(report: ValidationReport, directory) -> List[Path]:
    """Write ``ecdf.png`` and ``cullen_frey.png`` into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    with matplotlib.rc_context(RC):
        for name, draw in (("ecdf", plot_ecdf), ("cullen_frey", plot_cullen_frey)):
            fig, ax = plt.subplots(figsize=(6, 4) if name == "ecdf" else (5, 5))
            draw(report, ax)
            fig.tight_layout()
            path = directory / f"{name}.png"
            fig.savefig(path, metadata=PNG_METADATA)
            plt.close(fig)
            written.append(path)
    return written
