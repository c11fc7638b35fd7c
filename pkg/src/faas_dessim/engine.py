"""Discrete-event engine for a trace-replaying FaaS platform.

Requests flow workload generator -> load balancer -> provisioning -> replica.
Times are integer microseconds. A request never waits: when no replica is
available a new one is created (a cold start) on the least recently
assigned trace file.

Event order at equal timestamps: completions free their replicas first, then
idle replicas whose idle time reached the timeout are terminated, then the
arrival is dispatched.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import ConfigurationError, InputError
from .traces import ReplicaTrace, TraceFile
from .workload import ArrivalModel, ArrivalSchedule

BUSY = "busy"
AVAILABLE = "available"
TERMINATED = "terminated"

DEFAULT_IDLE_TIMEOUT_US = 300_000_000


@dataclass
class Replica:
    id: int
    trace: ReplicaTrace
    created_at: int
    state: str = BUSY
    available_since: int = 0
    served: int = 0


@dataclass(frozen=True)
class ResponseRecord:
    request_id: int
    arrival: int
    start: int
    duration: int
    status_code: int
    replica_id: int
    cold_start: bool

    @property
    def end(self) -> int:
        return self.start + self.duration


@dataclass(frozen=True)
class SimulationConfig:
    trace_files: tuple
    n_requests: int
    arrival_model: ArrivalModel = field(default_factory=lambda: ArrivalModel("closed-loop"))
    idle_timeout: int = DEFAULT_IDLE_TIMEOUT_US
    seed: int = 0
    warmup_fraction: float = 0.05

    def __post_init__(self):
        if not self.trace_files:
            raise ConfigurationError("at least one trace file is required")
        if self.n_requests < 1:
            raise ConfigurationError(f"n_requests must be >= 1, got {self.n_requests}")
        if self.idle_timeout <= 0:
            raise ConfigurationError("idle_timeout must be > 0")
        if not 0 <= self.warmup_fraction < 1:
            raise ConfigurationError("warmup_fraction must be in [0, 1)")
        ids = [t.id for t in self.trace_files]
        if len(set(ids)) != len(ids):
            raise ConfigurationError("trace file ids must be unique")


@dataclass(frozen=True)
class SimulationResult:
    records: tuple
    replicas_created: int
    cold_start_count: int
    trace_assignment_log: tuple


def select_available_replica(replicas: Iterable[Replica], now: int,
                             idle_timeout: Optional[int] = None) -> Optional[int]:
    """Id of the replica that most recently became available, or None.

    Ties on ``available_since`` go to the lowest id. With ``idle_timeout``
    given, replicas idle for at least that long are skipped.
    """
    best = None
    for r in replicas:
        if r.state != AVAILABLE:
            continue
        if idle_timeout is not None and now - r.available_since >= idle_timeout:
            continue
        if (best is None or r.available_since > best.available_since
                or (r.available_since == best.available_since and r.id < best.id)):
            best = r
    return None if best is None else best.id


def acquire_trace(trace_files: Sequence[TraceFile], assignment_log: List[Tuple[int, str]],
                  replica_id: int) -> str:
    """Pick the trace file for a new replica and append the assignment to the log.

    Never-assigned files go first in configuration order; after that the file
    whose latest assignment is oldest is reused.
    """
    last_use = {}
    for pos, (_, file_id) in enumerate(assignment_log):
        last_use[file_id] = pos
    chosen = None
    for tf in trace_files:
        if tf.id not in last_use:
            chosen = tf.id
            break
    if chosen is None:
        chosen = min(trace_files, key=lambda tf: last_use[tf.id]).id
    assignment_log.append((replica_id, chosen))
    return chosen


def expire_idle_replicas(replicas: Iterable[Replica], now: int, idle_timeout: int) -> List[int]:
    expired = []
    for r in replicas:
        if r.state == AVAILABLE and now - r.available_since >= idle_timeout:
            r.state = TERMINATED
            expired.append(r.id)
    return expired


class Platform:
    """Mutable platform state for one run: replica pool, completions, trace log."""

    def __init__(self, config: SimulationConfig):
        self.config = config
        self.files = {tf.id: tf for tf in config.trace_files}
        self.live = {}  # replica id -> Replica, terminated replicas removed
        self.completions = []  # heap of (time, replica id)
        self.assignment_log = []
        self.next_replica_id = 1

    def advance(self, now: int) -> None:
        while self.completions and self.completions[0][0] <= now:
            t, rid = heapq.heappop(self.completions)
            r = self.live[rid]
            r.state = AVAILABLE
            r.available_since = t
        for rid in expire_idle_replicas(self.live.values(), now, self.config.idle_timeout):
            del self.live[rid]

    def create_replica(self, now: int) -> Replica:
        rid = self.next_replica_id
        self.next_replica_id += 1
        file_id = acquire_trace(self.config.trace_files, self.assignment_log, rid)
        replica = Replica(rid, ReplicaTrace(self.files[file_id]), created_at=now)
        self.live[rid] = replica
        return replica

    def dispatch(self, request_id: int, now: int) -> ResponseRecord:
        rid = select_available_replica(self.live.values(), now)
        replica = self.live[rid] if rid is not None else self.create_replica(now)
        cold = replica.trace.cursor == 0
        entry = replica.trace.next_entry()
        replica.state = BUSY
        replica.served += 1
        heapq.heappush(self.completions, (now + entry.duration_us, replica.id))
        return ResponseRecord(request_id, now, now, entry.duration_us, entry.status_code,
                              replica.id, cold)


def run_simulation(config: SimulationConfig, schedule: ArrivalSchedule) -> SimulationResult:
    if schedule.n != config.n_requests:
        raise InputError(f"schedule has {schedule.n} arrivals, config expects {config.n_requests}")
    if not schedule.closed_loop:
        times = schedule.times
        if times and times[0] < 0:
            raise InputError("arrival times must be >= 0")
        for a, b in zip(times, times[1:]):
            if b < a:
                raise InputError("arrival schedule is not non-decreasing")
    platform = Platform(config)
    records = []
    now = 0
    for i in range(config.n_requests):
        if not schedule.closed_loop:
            now = schedule.times[i]
        elif records:
            now = records[-1].end
        platform.advance(now)
        records.append(platform.dispatch(i + 1, now))
    created = platform.next_replica_id - 1
    return SimulationResult(
        records=tuple(records),
        replicas_created=created,
        cold_start_count=sum(r.cold_start for r in records),
        trace_assignment_log=tuple(platform.assignment_log),
    )
