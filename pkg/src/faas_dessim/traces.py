"""Replica traces: measured (duration, status code) tuples and their replay cursor."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InputError


@dataclass(frozen=True)
class TraceEntry:
    duration_us: int
    status_code: int

    def __post_init__(self):
        if self.duration_us <= 0:
            raise InputError(f"trace duration must be > 0, got {self.duration_us} us")
        if not 100 <= self.status_code <= 599:
            raise InputError(f"status code out of range: {self.status_code}")


@dataclass(frozen=True)
class TraceFile:
    """An ordered trace; ``entries[0]`` is the cold-start invocation."""

    id: str
    entries: tuple

    def __post_init__(self):
        if len(self.entries) < 2:
            raise InputError(f"trace {self.id!r} has {len(self.entries)} entries, need >= 2")

    def __len__(self):
        return len(self.entries)


@dataclass
class ReplicaTrace:
    file: TraceFile
    cursor: int = field(default=0)

    def next_entry(self) -> TraceEntry:
        """Return the entry under the cursor and advance.

        Once the file is exhausted the cursor wraps to 1, never back to the
        cold-start entry at 0.
        """
        if self.cursor >= len(self.file.entries):
            self.cursor = 1
        entry = self.file.entries[self.cursor]
        self.cursor += 1
        return entry


def next_entry(replica_trace: ReplicaTrace) -> TraceEntry:
    return replica_trace.next_entry()
