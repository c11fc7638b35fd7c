import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from faas_dessim.traces import TraceEntry, TraceFile  # noqa: E402
from faas_dessim.workload import synth_trace  # noqa: E402

MS = 1000

_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record an acceptance criterion outcome for the terminal summary."""

    def record(number, title, passed, detail=""):
        _CRITERIA[number] = (title, passed, detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed, detail = _CRITERIA[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {title} {detail}".rstrip())


def trace(name, *durations_ms, code=200):
    return TraceFile(name, tuple(TraceEntry(int(d * MS), code) for d in durations_ms))


@pytest.fixture
def hand_traces():
    return (trace("A", 100, 10, 10), trace("B", 120, 12))


@pytest.fixture(scope="session")
def corpus():
    """32 synthetic traces x 5000 entries, warm mean 19 ms."""
    return tuple(synth_trace(5000, 250.0, 19.0, 0.25, seed=1000 + i, trace_id=f"trace_{i:03d}.csv")
                 for i in range(32))
