"""After-action review utilities: verify and re-simulate recorded sessions.

A session log is self-contained: its meta record embeds the resolved
scenario and seed, so any log can be replayed to a final state whose
canonical hash must equal the one sealed into the closing record.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from . import events as ev
from .events import EventRecord
from .scenario.io import parse_scenario
from .telemetry.log import read_log
from .telemetry.summaries import session_duration
from .world.sim import SimRun, extract_action_log, replay


@dataclass(frozen=True)
class ReplayCheck:
    session_id: str
    duration: int
    live_digest: str
    replay_digest: str

    @property
    def match(self) -> bool:
        return self.live_digest == self.replay_digest


def replay_records(records: list[EventRecord]) -> SimRun:
    """Re-simulate a session from its own log records."""
    if not records or records[0].kind != ev.SESSION_META:
        raise ValueError("log does not start with a session_meta record")
    meta = records[0].payload
    scenario, _warnings = parse_scenario(meta["scenario"], strict=True)
    setup = scenario.resolve(seed_override=meta["seed"]).to_world_setup()
    duration, _complete = session_duration(records)
    action_log = extract_action_log(records)
    return replay(setup, meta["seed"], action_log, until_tick=duration)


def verify_log(path: str | Path) -> ReplayCheck:
    """Replay a log file and compare against its sealed final-state hash."""
    records = read_log(path)
    meta = records[0].payload
    closing = [r for r in records if r.kind == ev.SESSION_END]
    if not closing:
        raise ValueError("log has no session_end record; cannot verify")
    run = replay_records(records)
    return ReplayCheck(
        session_id=meta["session"],
        duration=run.state.tick,
        live_digest=closing[0].payload["final_digest"],
        replay_digest=run.final_digest(),
    )
