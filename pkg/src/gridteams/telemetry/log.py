"""Append-only JSONL session log.

One event per line, flushed at every tick boundary so a crash never loses
more than the current tick and never tears a line. Records must arrive in
non-decreasing tick order. Headless runs stamp wall clocks from a simulated
clock derived from the tick counter, which keeps re-runs byte-identical.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Iterable

from ..events import EventRecord

_EPOCH = datetime(2000, 1, 1, tzinfo=timezone.utc)


class OrderError(Exception):
    pass


class WallClock:
    def stamp(self, tick: int) -> str:
        return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%f")[:-3] + "Z"


class SimulatedClock:
    """Deterministic wall clock: a fixed epoch advanced by tick / tick_rate."""

    def __init__(self, tick_rate: int):
        self.tick_rate = tick_rate

    def stamp(self, tick: int) -> str:
        seconds = tick / self.tick_rate
        moment = _EPOCH.timestamp() + seconds
        dt = datetime.fromtimestamp(moment, tz=timezone.utc)
        return dt.strftime("%Y-%m-%dT%H:%M:%S.%f")[:-3] + "Z"


class EventLogWriter:
    def __init__(self, path: str | Path, session_id: str, clock: WallClock | SimulatedClock):
        self.path = Path(path)
        self.session_id = session_id
        self.clock = clock
        self._fh: IO[str] | None = self.path.open("w", encoding="utf-8")
        self._last_tick = -1
        self.count = 0

    def append(self, record: EventRecord) -> None:
        if self._fh is None:
            raise OrderError("log sink is closed")
        if record.tick < self._last_tick:
            raise OrderError(
                f"record at tick {record.tick} after tick {self._last_tick}"
            )
        self._last_tick = record.tick
        record.session_id = self.session_id
        record.wall_clock = self.clock.stamp(record.tick)
        line = json.dumps(record.to_json_obj(), sort_keys=True, separators=(",", ":"))
        self._fh.write(line + "\n")
        self.count += 1

    def append_all(self, records: Iterable[EventRecord]) -> None:
        for record in records:
            self.append(record)

    def flush(self) -> None:
        if self._fh is not None:
            self._fh.flush()

    def close(self) -> None:
        if self._fh is not None:
            self._fh.flush()
            self._fh.close()
            self._fh = None


def record_event(sink: EventLogWriter, record: EventRecord) -> None:
    """Append one record; out-of-order ticks raise ``OrderError``."""
    sink.append(record)


class EventLogReader:
    """Reads a JSONL log, tolerating a torn final line from a crash."""

    def __init__(self, records: list[EventRecord], truncated: bool):
        self.records = records
        self.truncated = truncated

    @classmethod
    def from_path(cls, path: str | Path) -> "EventLogReader":
        records: list[EventRecord] = []
        truncated = False
        with Path(path).open("r", encoding="utf-8") as fh:
            for line in fh:
                if not line.endswith("\n"):
                    truncated = True
                    break
                stripped = line.strip()
                if not stripped:
                    continue
                try:
                    records.append(EventRecord.from_json_obj(json.loads(stripped)))
                except (json.JSONDecodeError, KeyError):
                    truncated = True
                    break
        return cls(records, truncated)


def read_log(path: str | Path) -> list[EventRecord]:
    return EventLogReader.from_path(path).records
