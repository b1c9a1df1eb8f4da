"""Per-agent summaries computed from a session log.

Counters follow the log schema exactly: idle ticks are ticks in which a
player produced no accepted state-changing action (absent, noop, rejected,
chat and sense all count as idle), distance is the number of accepted
moves, and rooms entered is the count of distinct rooms.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Any

from .. import events as ev
from ..events import EventRecord

TASKWORK = {"move", "grab", "drop", "clear"}


@dataclass
class AgentSummary:
    player_id: int
    role_id: str
    handicaps: dict[str, Any]
    correct_drops: int = 0
    incorrect_drops: int = 0
    idle_ticks: int = 0
    messages_sent: dict[str, int] = field(default_factory=dict)
    rooms_entered: int = 0
    distance_cells: int = 0
    incomplete: bool = False

    def to_json_obj(self) -> dict[str, Any]:
        return {
            "player": self.player_id,
            "role": self.role_id,
            "handicaps": self.handicaps,
            "correct_drops": self.correct_drops,
            "incorrect_drops": self.incorrect_drops,
            "idle_ticks": self.idle_ticks,
            "messages_sent": dict(sorted(self.messages_sent.items())),
            "rooms_entered": self.rooms_entered,
            "distance_cells": self.distance_cells,
            "incomplete": self.incomplete,
        }


def session_meta(records: list[EventRecord]) -> dict[str, Any]:
    if not records or records[0].kind != ev.SESSION_META:
        raise ValueError("log does not start with a session_meta record")
    return records[0].payload


def session_duration(records: list[EventRecord]) -> tuple[int, bool]:
    """(duration ticks, complete log flag). Truncated logs fall back to the
    last recorded tick."""
    for rec in records:
        if rec.kind == ev.END:
            return rec.payload["duration"], True
    last = max((r.tick for r in records), default=0)
    return last, False


def agent_summaries(records: list[EventRecord]) -> list[AgentSummary]:
    meta = session_meta(records)
    roles = {r["id"]: r for r in meta["roles"]}
    duration, complete = session_duration(records)

    summaries: dict[int, AgentSummary] = {}
    for slot in meta["slots"]:
        pid = slot["player"]
        role = roles[slot["role"]]
        handicaps = {k: v for k, v in role.items() if k != "id"}
        summaries[pid] = AgentSummary(
            player_id=pid,
            role_id=slot["role"],
            handicaps=handicaps,
            incomplete=not complete,
        )

    taskwork_ticks: dict[int, set[int]] = defaultdict(set)
    rooms: dict[int, set[str]] = defaultdict(set)
    messages: dict[int, Counter] = defaultdict(Counter)
    for rec in records:
        p = rec.payload
        if rec.kind == ev.ACTION and p["ok"] and p["action"]["kind"] in TASKWORK:
            pid = p["player"]
            taskwork_ticks[pid].add(rec.tick)
            if p["action"]["kind"] == "move":
                summaries[pid].distance_cells += 1
        elif rec.kind == ev.SCORE:
            if p["outcome"] == "correct":
                summaries[p["player"]].correct_drops += 1
            elif p["outcome"] == "incorrect":
                summaries[p["player"]].incorrect_drops += 1
        elif rec.kind == ev.ROOM_ENTERED:
            rooms[p["player"]].add(p["room"])
        elif rec.kind == ev.CHAT_SEND:
            messages[p["from"]][str(p["to"])] += 1

    for pid, summary in summaries.items():
        summary.idle_ticks = duration - len(taskwork_ticks[pid])
        summary.rooms_entered = len(rooms[pid])
        summary.messages_sent = dict(sorted(messages[pid].items()))
    return [summaries[pid] for pid in sorted(summaries)]
