"""Command line entry point: ``faas-dessim {gen-traces,simulate,stats,validate,report}``.

Errors are reported on stderr as one line, ``error: <kind>: <message>``,
with exit status 2 for usage errors and 1 for everything else.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, formats, stats, validation
from .engine import SimulationConfig, run_simulation
from .errors import FaasSimError, InputError, ParameterError
from .workload import ArrivalModel, build_schedule, synth_trace

log = logging.getLogger("faas_dessim")

SEED_ENV = "FAAS_DESSIM_SEED"


class UsageError(FaasSimError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def derive_seed(base: int, *keys: int) -> int:
    """Independent 64-bit child seed for ``(base, *keys)``."""
    return int(np.random.SeedSequence([base, *keys]).generate_state(1, np.uint64)[0])


def resolve_seed(value):
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _run_suffixed(out: Path, i: int) -> Path:
    return out.with_name(f"{out.stem}_run{i}{out.suffix or '.csv'}")


def _sidecar(path: Path) -> Path:
    return path.with_name(path.stem + ".meta.json")


def warm_mean_ms(traces, fraction: float) -> float:
    """Mean of the pooled trace durations after dropping each trace's warmup prefix."""
    pooled = []
    for tf in traces:
        pooled.extend(e.duration_us for e in stats.trim_warmup(tf.entries, fraction))
    return float(np.mean(pooled)) / 1000.0


# -- gen-traces ---------------------------------------------------------------

def cmd_gen_traces(args) -> int:
    if args.count < 1:
        raise ParameterError(f"--count must be >= 1, got {args.count}")
    seed = resolve_seed(args.seed)
    out = Path(args.out)
    width = max(3, len(str(args.count - 1)))
    traces = [
        synth_trace(args.entries, args.cold_ms, args.warm_mean_ms, args.dispersion,
                    derive_seed(seed, i), trace_id=f"trace_{i:0{width}d}.csv")
        for i in range(args.count)
    ]
    out.mkdir(parents=True, exist_ok=True)
    for tf in traces:
        formats.write_trace_csv(tf, out / tf.id)
    manifest = {
        "tool_version": __version__,
        "command": "gen-traces",
        "config": {"count": args.count, "entries": args.entries, "cold_ms": args.cold_ms,
                   "warm_mean_ms": args.warm_mean_ms, "dispersion": args.dispersion,
                   "seed": seed},
        "files": [tf.id for tf in traces],
    }
    formats._write_text(out / "manifest.json", formats.dumps_json(manifest))
    log.info("wrote %d traces to %s", len(traces), out)
    return 0


# -- simulate -----------------------------------------------------------------

def _simulate_one(config: SimulationConfig, run_seed: int):
    schedule = build_schedule(config.arrival_model, config.n_requests, run_seed)
    return run_simulation(config, schedule)


def cmd_simulate(args) -> int:
    if args.runs < 1:
        raise ParameterError("--runs must be >= 1")
    if args.arrival != "closed-loop" and args.lambda_ms is None and not args.lambda_from_traces:
        raise UsageError(f"--arrival {args.arrival} needs --lambda-ms or --lambda-from-traces")
    seed = resolve_seed(args.seed)
    traces = formats.read_trace_dir(args.traces)
    lam = args.lambda_ms
    if args.lambda_from_traces:
        lam = warm_mean_ms(traces, args.warmup_frac)
    model = ArrivalModel(args.arrival, None if args.arrival == "closed-loop" else lam)
    config = SimulationConfig(
        trace_files=tuple(traces),
        n_requests=args.requests,
        arrival_model=model,
        idle_timeout=formats.parse_duration_ms(args.idle_timeout_ms),
        seed=seed,
        warmup_fraction=args.warmup_frac,
    )
    run_seeds = [derive_seed(seed, i) for i in range(1, args.runs + 1)]
    if args.jobs > 1 and args.runs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_simulate_one, [config] * args.runs, run_seeds))
    else:
        results = [_simulate_one(config, s) for s in run_seeds]

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    for i, (result, run_seed) in enumerate(zip(results, run_seeds), start=1):
        path = _run_suffixed(out, i)
        formats.write_results(result, path)
        meta = {
            "tool_version": __version__,
            "command": "simulate",
            "run": i,
            "config": {
                "traces": [tf.id for tf in traces],
                "requests": args.requests,
                "arrival": args.arrival,
                "lambda_ms": lam if args.arrival != "closed-loop" else None,
                "lambda_from_traces": bool(args.lambda_from_traces),
                "idle_timeout_us": config.idle_timeout,
                "warmup_frac": args.warmup_frac,
                "seed": seed,
                "run_seed": run_seed,
                "runs": args.runs,
            },
            "replicas_created": result.replicas_created,
            "cold_start_count": result.cold_start_count,
            "trace_assignment_log": [list(x) for x in result.trace_assignment_log],
        }
        formats._write_text(_sidecar(path), formats.dumps_json(meta))
        log.info("run %d: %d replicas, wrote %s", i, result.replicas_created, path)
    return 0


# -- stats --------------------------------------------------------------------

def _run_summary(name, values):
    row = {"file": name, "n": int(values.size), "mean_ms": float(values.mean()),
           "median_ms": stats.percentile(values, 50), "skewness": None, "kurtosis": None}
    try:
        m = stats.moments(values)
        row["skewness"], row["kurtosis"] = m.skewness, m.kurtosis
    except InputError:
        pass
    row["percentiles_ms"] = {validation.format_percentile_label(p): stats.percentile(values, p)
                             for p in validation.PERCENTILE_ROWS}
    return row


def _load_runs(paths, fraction):
    runs = []
    for p in paths:
        values = formats.read_durations_ms(p)
        runs.append(values[stats.warmup_count(values.size, fraction):])
    return runs


def cmd_stats(args) -> int:
    if not args.inputs:
        raise UsageError("--in needs at least one results file")
    seed = resolve_seed(args.seed)
    runs = _load_runs(args.inputs, args.warmup_frac)
    pooled = np.concatenate(runs)
    cis = {}
    for p in validation.PERCENTILE_ROWS:
        iv = stats.percentile_ci(runs, p, args.confidence, seed)
        cis[validation.format_percentile_label(p)] = formats._interval_dict(iv)
    if len(runs) > 1:
        mean_ci = stats.t_interval([r.mean() for r in runs], args.confidence)
    else:
        mean_ci = stats.t_interval(runs[0], args.confidence) if runs[0].size > 1 else None
    doc = {
        "tool_version": __version__,
        "command": "stats",
        "config": {"inputs": [Path(p).name for p in args.inputs], "warmup_frac": args.warmup_frac,
                   "confidence": args.confidence, "seed": seed},
        "runs": [_run_summary(Path(p).name, r) for p, r in zip(args.inputs, runs)],
        "pooled": _run_summary("pooled", pooled),
        "mean_ci": formats._interval_dict(mean_ci) if mean_ci else None,
        "percentile_ci": cis,
    }
    formats._write_text(args.out, formats.dumps_json(doc))
    return 0


# -- validate / report --------------------------------------------------------

def _emit(report, args) -> None:
    if args.plot_data:
        formats.emit_plot_data(report, args.plot_data)
    if args.figures:
        from .plotting import render_figures

        render_figures(report, args.figures)
    sys.stdout.write(validation.summary_text(report))


def cmd_validate(args) -> int:
    if not args.measured or not args.simulated:
        raise UsageError("both --measured and --simulated need at least one file")
    seed = resolve_seed(args.seed)
    measured = _load_runs(args.measured, args.warmup_frac)
    simulated = _load_runs(args.simulated, args.warmup_frac)
    rows = tuple(validation.PERCENTILE_ROWS) + tuple(args.extra_percentile or ())
    report = validation.compare(
        measured, simulated, confidence=args.confidence, skew_tol=args.skew_tol,
        kurt_rel_tol=args.kurt_rel_tol, ks_tol=args.ks_tol, percentiles=rows, seed=seed,
        metadata={
            "warmup_fraction": args.warmup_frac,
            "inputs": {"measured": [Path(p).name for p in args.measured],
                       "simulated": [Path(p).name for p in args.simulated]},
            "percentile_method": {
                "measured": "t" if len(measured) > 1 else "bootstrap",
                "simulated": "t" if len(simulated) > 1 else "bootstrap",
            },
        },
    )
    formats.write_report(report, args.out)
    _emit(report, args)
    return 0


def cmd_report(args) -> int:
    report = formats.read_report(args.input)
    _emit(report, args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="faas-dessim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen-traces", help="write synthetic replica traces")
    g.add_argument("--count", type=int, default=32)
    g.add_argument("--entries", type=int, default=5000)
    g.add_argument("--cold-ms", type=float, default=250.0)
    g.add_argument("--warm-mean-ms", type=float, default=19.0)
    g.add_argument("--dispersion", type=float, default=0.25,
                   help="coefficient of variation of warm durations")
    g.add_argument("--seed", type=int)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_traces)

    s = sub.add_parser("simulate", help="replay traces under a workload")
    s.add_argument("--traces", required=True)
    s.add_argument("--requests", type=int, required=True)
    s.add_argument("--arrival", choices=["poisson", "exponential", "closed-loop"],
                   default="poisson")
    lam = s.add_mutually_exclusive_group()
    lam.add_argument("--lambda-ms", type=float)
    lam.add_argument("--lambda-from-traces", action="store_true")
    s.add_argument("--idle-timeout-ms", default="300000")
    s.add_argument("--warmup-frac", type=float, default=0.05,
                   help="trace prefix ignored when deriving lambda from traces")
    s.add_argument("--seed", type=int)
    s.add_argument("--runs", type=int, default=1)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    st = sub.add_parser("stats", help="summarise results files")
    st.add_argument("--in", dest="inputs", nargs="+", required=True)
    st.add_argument("--warmup-frac", type=float, default=0.05)
    st.add_argument("--confidence", type=float, default=0.95)
    st.add_argument("--seed", type=int)
    st.add_argument("--out", required=True)
    st.set_defaults(func=cmd_stats)

    v = sub.add_parser("validate", help="compare measured and simulated runs")
    v.add_argument("--measured", nargs="+", required=True)
    v.add_argument("--simulated", nargs="+", required=True)
    v.add_argument("--confidence", type=float, default=0.95)
    v.add_argument("--skew-tol", type=float, default=validation.DEFAULT_SKEW_TOL)
    v.add_argument("--kurt-rel-tol", type=float, default=validation.DEFAULT_KURT_REL_TOL)
    v.add_argument("--ks-tol", type=float)
    v.add_argument("--extra-percentile", type=float, action="append")
    v.add_argument("--warmup-frac", type=float, default=0.05)
    v.add_argument("--seed", type=int)
    v.add_argument("--out", default="report.json")
    v.add_argument("--plot-data")
    v.add_argument("--figures", help="directory for ecdf.png and cullen_frey.png")
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("report", help="render an existing report")
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--plot-data")
    r.add_argument("--figures")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"error: usage: {e}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: usage: {e}", file=sys.stderr)
        return 2
    except (FaasSimError, OSError) as e:
        kind = type(e).__name__
        msg = str(e).replace("\n", " ")
        print(f"error: {kind}: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
