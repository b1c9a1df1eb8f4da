"""Event records: the unit of the append-only session log.

Engine operations emit bare records (tick, kind, payload); the telemetry
sink stamps session id and wall clock when appending. Within a log the
(tick, emission order) pair is non-decreasing, the first record is
``session_meta`` and the last is ``session_end``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

# Record kinds, grouped by the layer that emits them.
SESSION_META = "session_meta"
JOIN = "join"
RECONNECT = "reconnect"
DISCONNECT = "disconnect"
SESSION_START = "session_start"
PERTURBATION = "perturbation"
OBSERVATION = "observation"
ACTION = "action"
ACTION_SUPERSEDED = "action_superseded"
CHAT_SEND = "chat_send"
CHAT_DELIVER = "chat_deliver"
SCORE = "score"
BATTERY_EMPTY = "battery_empty"
ROOM_ENTERED = "room_entered"
END = "end"
SURVEY = "survey"
SESSION_END = "session_end"

ALL_KINDS = (
    SESSION_META,
    JOIN,
    RECONNECT,
    DISCONNECT,
    SESSION_START,
    PERTURBATION,
    OBSERVATION,
    ACTION,
    ACTION_SUPERSEDED,
    CHAT_SEND,
    CHAT_DELIVER,
    SCORE,
    BATTERY_EMPTY,
    ROOM_ENTERED,
    END,
    SURVEY,
    SESSION_END,
)

# Kinds produced by re-simulating (scenario, seed, action history); everything
# else is connection/lifecycle envelope added by the session server.
ENGINE_KINDS = (PERTURBATION, OBSERVATION, ACTION, SCORE, BATTERY_EMPTY, ROOM_ENTERED)


@dataclass
class EventRecord:
    """One timestamped telemetry event.

    ``wall_clock`` and ``session_id`` are left empty by the engine and are
    filled in by the log sink at append time.
    """

    tick: int
    kind: str
    payload: dict[str, Any] = field(default_factory=dict)
    wall_clock: str | None = None
    session_id: str | None = None

    def to_json_obj(self) -> dict[str, Any]:
        return {
            "tick": self.tick,
            "wall_clock": self.wall_clock,
            "session_id": self.session_id,
            "kind": self.kind,
            "payload": self.payload,
        }

    @classmethod
    def from_json_obj(cls, obj: dict[str, Any]) -> "EventRecord":
        return cls(
            tick=obj["tick"],
            kind=obj["kind"],
            payload=obj.get("payload", {}),
            wall_clock=obj.get("wall_clock"),
            session_id=obj.get("session_id"),
        )
