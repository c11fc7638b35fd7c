"""Acceptance gate: one test per criterion, each recorded as a PASS/FAIL line.

The summary is printed at the end of the pytest run under
"acceptance criteria".
"""

import math
import time

import numpy as np
import pytest

import oracles
from conftest import MS, trace
from faas_dessim import formats, stats
from faas_dessim.cli import main, warm_mean_ms
from faas_dessim.engine import DEFAULT_IDLE_TIMEOUT_US, ResponseRecord, SimulationConfig, run_simulation
from faas_dessim.stats import Ecdf, Interval, Moments
from faas_dessim.validation import (
    PercentileRow,
    ValidationReport,
    Verdict,
    compare,
    ks_distance,
)
from faas_dessim.workload import ArrivalModel, ArrivalSchedule, build_schedule, synth_trace

SEEDS = (11, 22, 33, 44)


def test_c1_replay_fidelity(criterion):
    t = synth_trace(5000, 250.0, 19.0, 0.25, seed=101, trace_id="only.csv")
    cfg = SimulationConfig((t,), 4999)
    start = time.perf_counter()
    res = run_simulation(cfg, ArrivalSchedule.closed(4999))
    elapsed = time.perf_counter() - start
    got = [(r.duration, r.status_code) for r in res.records]
    want = [(e.duration_us, e.status_code) for e in t.entries[:4999]]
    ok = got == want and elapsed < 1.0
    criterion(1, "replay fidelity", ok, f"({elapsed:.3f}s)")
    assert got == want
    assert elapsed < 1.0


def test_c2_hand_simulation(criterion, hand_traces):
    cfg = SimulationConfig(hand_traces, 3)
    res = run_simulation(cfg, ArrivalSchedule.from_times([0, 5 * MS, 50 * MS]))
    expected = (
        ResponseRecord(1, 0, 0, 100 * MS, 200, 1, True),
        ResponseRecord(2, 5 * MS, 5 * MS, 120 * MS, 200, 2, True),
        ResponseRecord(3, 50 * MS, 50 * MS, 100 * MS, 200, 3, True),
    )
    ok = (res.records == expected and res.replicas_created == 3 and res.cold_start_count == 3
          and res.trace_assignment_log[-1] == (3, "A"))
    criterion(2, "hand-simulation oracle", ok)
    assert ok


def test_c3_scaling_semantics(criterion, corpus):
    lam = warm_mean_ms(corpus, 0.05)
    busy, quiet = [], []
    for seed in SEEDS:
        for factor, sink in ((1, busy), (50, quiet)):
            model = ArrivalModel("poisson", lam * factor)
            cfg = SimulationConfig(corpus, 20000, model, seed=seed)
            res = run_simulation(cfg, build_schedule(model, 20000, seed))
            sink.append(res.replicas_created)
    ok = all(n > 1 for n in busy) and all(n == 1 for n in quiet)
    criterion(3, "scaling semantics", ok, f"(lambda={lam:.3f}ms busy={busy} quiet={quiet})")
    assert all(n > 1 for n in busy)
    assert all(n == 1 for n in quiet)


def test_c4_idle_timeout_boundary(criterion):
    t = trace("A", 100, 10, 10)
    freed = 100 * MS
    outcomes = {}
    for offset in (0, -1):
        second = freed + DEFAULT_IDLE_TIMEOUT_US + offset
        cfg = SimulationConfig((t,), 2)
        res = run_simulation(cfg, ArrivalSchedule.from_times([0, second]))
        outcomes[offset] = (res.replicas_created, res.records[1].replica_id,
                            res.records[1].cold_start)
    ok = outcomes[0] == (2, 2, True) and outcomes[-1] == (1, 1, False)
    criterion(4, "idle-timeout boundary", ok)
    assert outcomes[0] == (2, 2, True)
    assert outcomes[-1] == (1, 1, False)


def test_c5_shape_preservation(criterion, corpus):
    lam = warm_mean_ms(corpus, 0.05)
    model = ArrivalModel("poisson", lam)
    cfg = SimulationConfig(corpus, 20000, model, seed=5)
    res = run_simulation(cfg, build_schedule(model, 20000, 5))
    simulated = np.array([r.duration for r in stats.trim_warmup(res.records, 0.05)]) / 1000.0
    inputs = [np.array([e.duration_us for e in stats.trim_warmup(tf.entries, 0.05)]) / 1000.0
              for tf in corpus]
    report = compare(inputs, [simulated])
    ks = report.ks_distance
    ok = ks <= 0.02 and report.verdict.label == "shape-valid"
    m, s = report.moments["measured"], report.moments["simulated"]
    criterion(5, "shape preservation", ok,
              f"(ks={ks:.4f} skew {m.skewness:.3f}/{s.skewness:.3f} "
              f"kurt {m.kurtosis:.3f}/{s.kurtosis:.3f})")
    assert ks <= 0.02
    assert report.verdict.checks == {"skewness": True, "kurtosis": True}


def test_c6_statistics_oracles(criterion):
    rng = np.random.default_rng(2026)
    failures = []
    cases = 0
    for _ in range(120):
        n = int(rng.integers(2, 51))
        a = np.round(rng.lognormal(3, 0.4, n), 3)
        b = np.round(rng.lognormal(3, 0.4, int(rng.integers(1, 51))), 3)
        al, bl = a.tolist(), b.tolist()
        cases += 1

        e = stats.ecdf(a)
        if any(e(x) != oracles.ecdf_at(al, x) for x in al + bl):
            failures.append("ecdf")

        if ks_distance(stats.ecdf(a), stats.ecdf(b)) != oracles.ks_brute(al, bl):
            failures.append("ks")

        for p in (0, 12.5, 50, 95, 99, 99.9, 100):
            if not math.isclose(stats.percentile(a, p), oracles.percentile_type7(al, p),
                                rel_tol=1e-9):
                failures.append("percentile")

        if len(set(al)) > 1:
            m = stats.moments(a)
            mean, g1, b2 = oracles.central_moments(al)
            if not (math.isclose(m.mean, mean, rel_tol=1e-9)
                    and math.isclose(m.skewness, g1, rel_tol=1e-9)
                    and math.isclose(m.kurtosis, b2, rel_tol=1e-9)):
                failures.append("moments")

        k = int(rng.integers(2, 6))
        runs = [np.round(rng.lognormal(3, 0.4, int(rng.integers(1, 51))), 3) for _ in range(k)]
        p = float(rng.choice([50, 95, 99, 99.9]))
        iv = stats.percentile_ci(runs, p, 0.95)
        per_run = [oracles.percentile_type7(r.tolist(), p) for r in runs]
        if len(set(per_run)) > 1:
            lo, hi = oracles.t_interval(per_run, 0.95)
        else:
            lo = hi = per_run[0]
        if not (math.isclose(iv.lower, lo, rel_tol=1e-9) and math.isclose(iv.upper, hi, rel_tol=1e-9)):
            failures.append("percentile_ci")

    ok = cases >= 100 and not failures
    criterion(6, "statistics oracles", ok, f"({cases} samples, failures={sorted(set(failures))})")
    assert ok, failures


def _pipeline(root):
    traces, sim = root / "traces", root / "sim"
    steps = [
        ["gen-traces", "--count", "32", "--entries", "5000", "--seed", "2024", "--out", str(traces)],
        ["simulate", "--traces", str(traces), "--requests", "20000", "--arrival", "poisson",
         "--lambda-from-traces", "--runs", "4", "--seed", "2024", "--out", str(sim / "res.csv")],
    ]
    start = time.perf_counter()
    for argv in steps:
        assert main(argv) == 0
    measured = sorted(str(p) for p in traces.glob("*.csv"))
    simulated = sorted(str(p) for p in sim.glob("res_run*.csv"))
    assert main(["validate", "--measured", *measured, "--simulated", *simulated,
                 "--out", str(root / "report.json"), "--plot-data", str(root / "plots"),
                 "--figures", str(root / "figures")]) == 0
    elapsed = time.perf_counter() - start
    files = {p.relative_to(root).as_posix(): p.read_bytes()
             for p in sorted(root.rglob("*")) if p.is_file()}
    return files, elapsed


@pytest.mark.slow
def test_c7_determinism(criterion, tmp_path, capsys):
    first, t1 = _pipeline(tmp_path / "one")
    second, t2 = _pipeline(tmp_path / "two")
    capsys.readouterr()
    same = first == second
    ok = same and max(t1, t2) < 30.0 and len(first) >= 32 + 1 + 8 + 1 + 3 + 2
    criterion(7, "pipeline determinism", ok, f"({len(first)} files, {t1:.1f}s / {t2:.1f}s)")
    assert first.keys() == second.keys()
    assert same
    assert max(t1, t2) < 30.0


def test_c8_warmup_rule(criterion):
    got = (stats.warmup_count(5000, 0.05), stats.warmup_count(20000, 0.05),
           len(stats.trim_warmup(list(range(5000)), 0.05)),
           len(stats.trim_warmup(list(range(20000)), 0.05)))
    ok = got == (250, 1000, 4750, 19000)
    criterion(8, "warmup rule", ok, str(got))
    assert ok


PAPER_TABLE = [
    (50.0, (22.83, 22.84), (18.93, 18.97)),
    (95.0, (34.76, 34.79), (26.89, 26.91)),
    (99.0, (39.12, 39.84), (29.03, 30.68)),
    (99.9, (69.14, 79.70), (53.29, 60.28)),
]

PAPER_ROWS = [
    "50th\t[22.83, 22.84]\t[18.93, 18.97]",
    "95th\t[34.76, 34.79]\t[26.89, 26.91]",
    "99th\t[39.12, 39.84]\t[29.03, 30.68]",
    "99.9th\t[69.14, 79.70]\t[53.29, 60.28]",
]


def _fixture_report():
    ecdf = Ecdf(np.array([18.0, 19.0, 22.0]), np.array([1 / 3, 2 / 3, 1.0]), 3)
    return ValidationReport(
        moments={"measured": Moments(22.0, 22.83, 2.1, 9.5, 76000),
                 "simulated": Moments(18.9, 18.95, 2.0, 9.1, 76000)},
        percentiles=[PercentileRow(p, Interval(*m, 0.95), Interval(*s, 0.95))
                     for p, m, s in PAPER_TABLE],
        mean_difference=Interval(3.86, 3.91, 0.95, "welch", 3.885),
        ks_distance=0.3,
        ecdf={"measured": ecdf, "simulated": ecdf},
        verdict=Verdict({"skewness": True, "kurtosis": True}),
        metadata={"fixture": "published table"},
    )


def test_c9_report_conformance(criterion, tmp_path, capsys):
    # cmd_validate output carries exactly the four rows with interval fields
    tdir = tmp_path / "traces"
    assert main(["gen-traces", "--count", "3", "--entries", "400", "--seed", "3",
                 "--out", str(tdir)]) == 0
    assert main(["simulate", "--traces", str(tdir), "--requests", "800", "--lambda-ms", "19",
                 "--runs", "2", "--seed", "3", "--out", str(tmp_path / "r.csv")]) == 0
    out = tmp_path / "report.json"
    assert main(["validate", "--measured", *map(str, sorted(tdir.glob("*.csv"))),
                 "--simulated", str(tmp_path / "r_run1.csv"), str(tmp_path / "r_run2.csv"),
                 "--out", str(out)]) == 0
    capsys.readouterr()
    rows = formats.read_report(out).percentiles
    doc_rows = formats.report_to_dict(formats.read_report(out))["percentiles"]
    rows_ok = ([r.percentile for r in rows] == [50.0, 95.0, 99.0, 99.9]
               and all({"lower_ms", "upper_ms"} <= set(r[side]) for r in doc_rows
                       for side in ("measured", "simulated")))

    # published values render verbatim from a fixture report
    fixture = tmp_path / "paper.json"
    formats.write_report(_fixture_report(), fixture)
    assert main(["report", "--in", str(fixture)]) == 0
    lines = capsys.readouterr().out.splitlines()
    render_ok = (lines[1:5] == PAPER_ROWS
                 and "mean difference (measured - simulated): [3.86, 3.91] ms" in lines)
    ok = rows_ok and render_ok
    criterion(9, "report conformance", ok)
    assert rows_ok
    assert lines[1:5] == PAPER_ROWS
    assert "mean difference (measured - simulated): [3.86, 3.91] ms" in lines
