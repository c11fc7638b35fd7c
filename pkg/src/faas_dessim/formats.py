"""File formats: trace CSV, results CSV, report JSON and plot-ready CSV data.

Trace CSV
    Header ``duration_ms,status_code``; one row per invocation, the first row
    being the cold start. Durations are decimals with at most three
    fractional digits, so they convert exactly to integer microseconds.

Results CSV
    Header ``request_id,arrival_us,start_us,duration_us,status_code,replica_id,cold_start``;
    integers only, ``cold_start`` is ``1`` or ``0``, rows in arrival order.

Report JSON
    See :data:`REPORT_SCHEMA`. Physical quantities carry a unit suffix in
    their key (``lower_ms``); floats are written with Python's shortest
    round-trip repr, so reading a report back gives identical values.

Every writer emits UTF-8 with LF line endings and ``.`` as decimal separator.
"""

from __future__ import annotations

import csv
import io
import json
import os
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Iterable, List, Sequence, Union

import jsonschema
import numpy as np

from .engine import ResponseRecord, SimulationResult
from .errors import FormatError, InputError
from .stats import Ecdf, Interval, Moments
from .traces import TraceEntry, TraceFile
from .validation import PercentileRow, ValidationReport, Verdict

PathLike = Union[str, os.PathLike]

TRACE_HEADER = ["duration_ms", "status_code"]
RESULTS_HEADER = ["request_id", "arrival_us", "start_us", "duration_us",
                  "status_code", "replica_id", "cold_start"]
REPORT_FORMAT = "faas-dessim-report/1"


def parse_duration_ms(text: str) -> int:
    """Decimal milliseconds -> integer microseconds, exactly."""
    try:
        d = Decimal(text.strip())
    except InvalidOperation:
        raise FormatError(f"bad decimal duration {text!r}") from None
    if not d.is_finite():
        raise FormatError(f"bad decimal duration {text!r}")
    if d.as_tuple().exponent < -3:
        raise FormatError(f"duration {text!r} has more than 3 fractional digits")
    us = d * 1000
    if us <= 0:
        raise FormatError(f"duration must be > 0, got {text!r}")
    return int(us)


def format_duration_ms(us: int) -> str:
    return f"{us // 1000}.{us % 1000:03d}"


def _write_text(path: PathLike, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _read_rows(path: PathLike, header: List[str]) -> list:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != header:
        raise FormatError(f"{path}: expected header {','.join(header)}")
    return [r for r in rows[1:] if r]


def _int(text: str, what: str, path: PathLike, line: int) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise FormatError(f"{path}:{line}: bad {what} {text!r}") from None


def sniff_header(path: PathLike) -> List[str]:
    with open(path, encoding="utf-8", newline="") as fh:
        first = fh.readline()
    return [c.strip() for c in first.strip().split(",")]


# -- traces -------------------------------------------------------------------

def read_trace_csv(path: PathLike, trace_id: str = None) -> TraceFile:
    path = Path(path)
    entries = []
    for line, row in enumerate(_read_rows(path, TRACE_HEADER), start=2):
        if len(row) != 2:
            raise FormatError(f"{path}:{line}: expected 2 fields, got {len(row)}")
        try:
            duration = parse_duration_ms(row[0])
        except FormatError as e:
            raise FormatError(f"{path}:{line}: {e}") from None
        code = _int(row[1], "status code", path, line)
        if not 100 <= code <= 599:
            raise FormatError(f"{path}:{line}: status code out of range: {code}")
        entries.append(TraceEntry(duration, code))
    if len(entries) < 2:
        raise FormatError(f"{path}: a trace needs at least 2 entries, got {len(entries)}")
    return TraceFile(trace_id or path.name, tuple(entries))


def write_trace_csv(trace: TraceFile, path: PathLike) -> None:
    rows = ((format_duration_ms(e.duration_us), e.status_code) for e in trace.entries)
    _write_text(path, _csv_text(TRACE_HEADER, rows))


def read_trace_dir(directory: PathLike) -> List[TraceFile]:
    """All ``*.csv`` traces in ``directory``, ordered by file name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise InputError(f"trace directory not found: {directory}")
    files = sorted(p for p in directory.iterdir() if p.suffix == ".csv" and p.is_file())
    if not files:
        raise InputError(f"no .csv traces in {directory}")
    return [read_trace_csv(p) for p in files]


# -- results ------------------------------------------------------------------

def results_text(records: Sequence[ResponseRecord]) -> str:
    if not records:
        raise InputError("refusing to write a results file with no records")
    rows = ((r.request_id, r.arrival, r.start, r.duration, r.status_code, r.replica_id,
             int(r.cold_start)) for r in records)
    return _csv_text(RESULTS_HEADER, rows)


def write_results(result: Union[SimulationResult, Sequence[ResponseRecord]], path: PathLike) -> None:
    records = result.records if isinstance(result, SimulationResult) else result
    _write_text(path, results_text(records))


def read_results(path: PathLike) -> tuple:
    records = []
    prev = None
    for line, row in enumerate(_read_rows(path, RESULTS_HEADER), start=2):
        if len(row) != len(RESULTS_HEADER):
            raise FormatError(f"{path}:{line}: expected {len(RESULTS_HEADER)} fields")
        vals = [_int(v, name, path, line) for v, name in zip(row, RESULTS_HEADER)]
        if vals[6] not in (0, 1):
            raise FormatError(f"{path}:{line}: cold_start must be 0 or 1")
        if prev is not None and vals[1] < prev:
            raise FormatError(f"{path}:{line}: arrival_us decreases")
        prev = vals[1]
        if vals[3] <= 0:
            raise FormatError(f"{path}:{line}: duration_us must be > 0")
        records.append(ResponseRecord(*vals[:6], cold_start=bool(vals[6])))
    if not records:
        raise FormatError(f"{path}: no records")
    return tuple(records)


def read_durations_ms(path: PathLike) -> np.ndarray:
    """Response times (ms) from either a results CSV or a trace CSV, in file order."""
    header = sniff_header(path)
    if header == RESULTS_HEADER:
        return np.array([r.duration for r in read_results(path)], dtype=float) / 1000.0
    if header == TRACE_HEADER:
        return np.array([e.duration_us for e in read_trace_csv(path).entries],
                        dtype=float) / 1000.0
    raise FormatError(f"{path}: neither a results nor a trace CSV")


# -- report -------------------------------------------------------------------

_INTERVAL = {
    "type": "object",
    "required": ["lower_ms", "upper_ms", "confidence", "method", "point_ms"],
    "properties": {
        "lower_ms": {"type": "number"},
        "upper_ms": {"type": "number"},
        "confidence": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "method": {"type": "string"},
        "point_ms": {"type": ["number", "null"]},
    },
    "additionalProperties": False,
}

_MOMENTS = {
    "type": "object",
    "required": ["mean_ms", "median_ms", "skewness", "kurtosis", "n"],
    "properties": {
        "mean_ms": {"type": "number"},
        "median_ms": {"type": "number"},
        "skewness": {"type": "number"},
        "kurtosis": {"type": "number"},
        "n": {"type": "integer", "minimum": 2},
    },
    "additionalProperties": False,
}

_ECDF = {
    "type": "object",
    "required": ["x_ms", "p", "n"],
    "properties": {
        "x_ms": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "p": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "n": {"type": "integer", "minimum": 1},
    },
}


def _per_source(schema):
    return {"type": "object", "required": ["measured", "simulated"],
            "properties": {"measured": schema, "simulated": schema},
            "additionalProperties": False}


REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["format", "tool_version", "moments", "percentiles", "mean_difference",
                 "ks_distance", "cullen_frey", "verdict", "metadata", "ecdf"],
    "properties": {
        "format": {"const": REPORT_FORMAT},
        "tool_version": {"type": "string"},
        "moments": _per_source(_MOMENTS),
        "percentiles": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["percentile", "measured", "simulated"],
                "properties": {"percentile": {"type": "number", "minimum": 0, "maximum": 100},
                               "measured": _INTERVAL, "simulated": _INTERVAL},
                "additionalProperties": False,
            },
        },
        "mean_difference": _INTERVAL,
        "ks_distance": {"type": "number", "minimum": 0, "maximum": 1},
        "cullen_frey": _per_source({
            "type": "object", "required": ["skewness_sq", "kurtosis"],
            "properties": {"skewness_sq": {"type": "number"}, "kurtosis": {"type": "number"}},
        }),
        "verdict": {
            "type": "object", "required": ["label", "checks"],
            "properties": {"label": {"enum": ["shape-valid", "shape-divergent"]},
                           "checks": {"type": "object",
                                      "additionalProperties": {"type": "boolean"}}},
        },
        "metadata": {"type": "object"},
        "ecdf": _per_source(_ECDF),
    },
}


def _interval_dict(iv: Interval) -> dict:
    return {"lower_ms": iv.lower, "upper_ms": iv.upper, "confidence": iv.confidence,
            "method": iv.method, "point_ms": iv.point}


def _interval_from(d: dict) -> Interval:
    return Interval(d["lower_ms"], d["upper_ms"], d["confidence"], d["method"], d["point_ms"])


def report_to_dict(report: ValidationReport) -> dict:
    from . import __version__

    return {
        "format": REPORT_FORMAT,
        "tool_version": __version__,
        "verdict": {"label": report.verdict.label, "checks": dict(report.verdict.checks)},
        "percentiles": [
            {"percentile": row.percentile, "measured": _interval_dict(row.measured),
             "simulated": _interval_dict(row.simulated)}
            for row in report.percentiles
        ],
        "mean_difference": _interval_dict(report.mean_difference),
        "ks_distance": report.ks_distance,
        "moments": {
            src: {"mean_ms": m.mean, "median_ms": m.median, "skewness": m.skewness,
                  "kurtosis": m.kurtosis, "n": m.n}
            for src, m in report.moments.items()
        },
        "cullen_frey": {src: {"skewness_sq": g, "kurtosis": b}
                        for src, (g, b) in report.cullen_frey.items()},
        "metadata": report.metadata,
        "ecdf": {src: {"x_ms": e.x.tolist(), "p": e.p.tolist(), "n": e.n}
                 for src, e in report.ecdf.items()},
    }


def report_from_dict(doc: dict) -> ValidationReport:
    try:
        jsonschema.validate(doc, REPORT_SCHEMA)
    except jsonschema.ValidationError as e:
        raise FormatError(f"report does not match schema: {e.message}") from None
    return ValidationReport(
        moments={src: Moments(m["mean_ms"], m["median_ms"], m["skewness"], m["kurtosis"], m["n"])
                 for src, m in doc["moments"].items()},
        percentiles=[PercentileRow(r["percentile"], _interval_from(r["measured"]),
                                   _interval_from(r["simulated"]))
                     for r in doc["percentiles"]],
        mean_difference=_interval_from(doc["mean_difference"]),
        ks_distance=doc["ks_distance"],
        ecdf={src: Ecdf(np.array(e["x_ms"], dtype=float), np.array(e["p"], dtype=float), e["n"])
              for src, e in doc["ecdf"].items()},
        verdict=Verdict(dict(doc["verdict"]["checks"])),
        metadata=doc["metadata"],
    )


def dumps_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False, allow_nan=False) + "\n"


def write_report(report: ValidationReport, path: PathLike) -> None:
    _write_text(path, dumps_json(report_to_dict(report)))


def read_report(path: PathLike) -> ValidationReport:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise FormatError(f"{path}: invalid JSON: {e}") from None
    return report_from_dict(doc)


# -- plot data ----------------------------------------------------------------

def emit_plot_data(report: ValidationReport, directory: PathLike) -> List[Path]:
    """Write ``ecdf_<source>.csv`` per source plus ``cullen_frey.csv``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for src, e in report.ecdf.items():
        path = directory / f"ecdf_{src}.csv"
        _write_text(path, _csv_text(["x_ms", "F"],
                                    ((repr(float(x)), repr(float(p))) for x, p in zip(e.x, e.p))))
        written.append(path)
    path = directory / "cullen_frey.csv"
    _write_text(path, _csv_text(["source", "skewness_sq", "kurtosis"],
                                ((src, repr(float(g)), repr(float(b)))
                                 for src, (g, b) in report.cullen_frey.items())))
    written.append(path)
    return written
