"""Wire protocol: newline-delimited UTF-8 JSON frames, one codec for every
transport (raw TCP, WebSocket, in-memory pipes).

Every frame carries the protocol version under ``v``. ``decode(encode(m))``
is the identity for every message variant; the exact byte layouts are pinned
by golden-frame tests so they stay stable across releases.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .. import PROTOCOL_VERSION


class DecodeError(Exception):
    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"byte {offset}: {message}")
        self.offset = offset


class VersionError(DecodeError):
    pass


class UnknownKindError(DecodeError):
    pass


@dataclass(frozen=True)
class Join:
    player_kind: str  # "human" | "agent"
    display_name: str
    slot: str | None = None  # None requests auto-assignment
    token: str | None = None
    session: str | None = None

    KIND = "join"

    def to_obj(self) -> dict[str, Any]:
        return {
            "slot": self.slot,
            "player_kind": self.player_kind,
            "display_name": self.display_name,
            "token": self.token,
            "session": self.session,
        }

    @classmethod
    def from_obj(cls, o: dict[str, Any]) -> "Join":
        return cls(
            player_kind=o["player_kind"],
            display_name=o["display_name"],
            slot=o.get("slot"),
            token=o.get("token"),
            session=o.get("session"),
        )


@dataclass(frozen=True)
class Welcome:
    player: int
    slot: str
    role: dict[str, Any]
    scenario_digest: str
    session: str
    tick_rate: int
    time_limit_ticks: int
    sequence: tuple[int, ...]
    palette_size: int
    chat_mode: str
    chat_catalog: tuple[str, ...]
    reconnect_token: str
    survey_tasks: tuple[str, ...] = ()

    KIND = "welcome"

    def to_obj(self) -> dict[str, Any]:
        return {
            "player": self.player,
            "slot": self.slot,
            "role": self.role,
            "scenario_digest": self.scenario_digest,
            "session": self.session,
            "tick_rate": self.tick_rate,
            "time_limit_ticks": self.time_limit_ticks,
            "sequence": list(self.sequence),
            "palette_size": self.palette_size,
            "chat_mode": self.chat_mode,
            "chat_catalog": list(self.chat_catalog),
            "reconnect_token": self.reconnect_token,
            "survey_tasks": list(self.survey_tasks),
        }

    @classmethod
    def from_obj(cls, o: dict[str, Any]) -> "Welcome":
        return cls(
            player=o["player"],
            slot=o["slot"],
            role=o["role"],
            scenario_digest=o["scenario_digest"],
            session=o["session"],
            tick_rate=o["tick_rate"],
            time_limit_ticks=o["time_limit_ticks"],
            sequence=tuple(o["sequence"]),
            palette_size=o["palette_size"],
            chat_mode=o["chat_mode"],
            chat_catalog=tuple(o["chat_catalog"]),
            reconnect_token=o["reconnect_token"],
            survey_tasks=tuple(o.get("survey_tasks", [])),
        )


@dataclass(frozen=True)
class ObservationMsg:
    tick: int
    observation: dict[str, Any]

    KIND = "observation"

    def to_obj(self) -> dict[str, Any]:
        return {"tick": self.tick, "observation": self.observation}

    @classmethod
    def from_obj(cls, o: dict[str, Any]) -> "ObservationMsg":
        return cls(tick=o["tick"], observation=o["observation"])


@dataclass(frozen=True)
class ActionMsg:
    action: dict[str, Any]
    tick: int | None = None
    ref: int | None = None

    KIND = "action"

    def to_obj(self) -> dict[str, Any]:
        return {"action": self.action, "tick": self.tick, "ref": self.ref}

    @classmethod
    def from_obj(cls, o: dict[str, Any]) -> "ActionMsg":
        return cls(action=o["action"], tick=o.get("tick"), ref=o.get("ref"))


@dataclass(frozen=True)
class Ack:
    tick: int
    ref: int | None = None

    KIND = "ack"

    def to_obj(self) -> dict[str, Any]:
        return {"tick": self.tick, "ref": self.ref}

    @classmethod
    def from_obj(cls, o: dict[str, Any]) -> "Ack":
        return cls(tick=o["tick"], ref=o.get("ref"))


@dataclass(frozen=True)
class Reject:
    reason: str
    tick: int | None = None
    ref: int | None = None
    message: str = ""

    KIND = "reject"

    def to_obj(self) -> dict[str, Any]:
        return {"reason": self.reason, "tick": self.tick, "ref": self.ref, "message": self.message}

    @classmethod
    def from_obj(cls, o: dict[str, Any]) -> "Reject":
        return cls(
            reason=o["reason"], tick=o.get("tick"), ref=o.get("ref"), message=o.get("message", "")
        )


@dataclass(frozen=True)
class ChatSendMsg:
    to: str | int  # "all" or a player id
    body: dict[str, Any]  # {"text": str} | {"catalog": int}

    KIND = "chat_send"

    def to_obj(self) -> dict[str, Any]:
        return {"to": self.to, "body": self.body}

    @classmethod
    def from_obj(cls, o: dict[str, Any]) -> "ChatSendMsg":
        return cls(to=o["to"], body=o["body"])


@dataclass(frozen=True)
class ChatDeliverMsg:
    sender: int
    to: str | int  # as addressed: "all" or the recipient id
    body: dict[str, Any]
    tick: int

    KIND = "chat_deliver"

    def to_obj(self) -> dict[str, Any]:
        return {"from": self.sender, "to": self.to, "body": self.body, "tick": self.tick}

    @classmethod
    def from_obj(cls, o: dict[str, Any]) -> "ChatDeliverMsg":
        return cls(sender=o["from"], to=o["to"], body=o["body"], tick=o["tick"])


@dataclass(frozen=True)
class SessionEventMsg:
    event: str  # "start" | "perturbation" | "sequence_advance" | "end"
    tick: int
    payload: dict[str, Any] = field(default_factory=dict)

    KIND = "session_event"

    def to_obj(self) -> dict[str, Any]:
        return {"event": self.event, "tick": self.tick, "payload": self.payload}

    @classmethod
    def from_obj(cls, o: dict[str, Any]) -> "SessionEventMsg":
        return cls(event=o["event"], tick=o["tick"], payload=o.get("payload", {}))


@dataclass(frozen=True)
class SurveyPromptMsg:
    instrument: dict[str, Any]

    KIND = "survey_prompt"

    def to_obj(self) -> dict[str, Any]:
        return {"instrument": self.instrument}

    @classmethod
    def from_obj(cls, o: dict[str, Any]) -> "SurveyPromptMsg":
        return cls(instrument=o["instrument"])


@dataclass(frozen=True)
class SurveyResponseMsg:
    instrument: str
    workflow_choice: int | None = None
    items: tuple[dict[str, Any], ...] = ()

    KIND = "survey_response"

    def to_obj(self) -> dict[str, Any]:
        return {
            "instrument": self.instrument,
            "workflow_choice": self.workflow_choice,
            "items": list(self.items),
        }

    @classmethod
    def from_obj(cls, o: dict[str, Any]) -> "SurveyResponseMsg":
        return cls(
            instrument=o["instrument"],
            workflow_choice=o.get("workflow_choice"),
            items=tuple(o.get("items", [])),
        )


@dataclass(frozen=True)
class ErrorMsg:
    code: str
    message: str = ""

    KIND = "error"

    def to_obj(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message}

    @classmethod
    def from_obj(cls, o: dict[str, Any]) -> "ErrorMsg":
        return cls(code=o["code"], message=o.get("message", ""))


MESSAGE_TYPES = {
    cls.KIND: cls
    for cls in (
        Join,
        Welcome,
        ObservationMsg,
        ActionMsg,
        Ack,
        Reject,
        ChatSendMsg,
        ChatDeliverMsg,
        SessionEventMsg,
        SurveyPromptMsg,
        SurveyResponseMsg,
        ErrorMsg,
    )
}

Message = (
    Join
    | Welcome
    | ObservationMsg
    | ActionMsg
    | Ack
    | Reject
    | ChatSendMsg
    | ChatDeliverMsg
    | SessionEventMsg
    | SurveyPromptMsg
    | SurveyResponseMsg
    | ErrorMsg
)


def encode(message: Message) -> bytes:
    obj = {"v": PROTOCOL_VERSION, "kind": message.KIND}
    obj.update(message.to_obj())
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8") + b"\n"


def decode_obj(obj: dict[str, Any], offset: int = 0) -> Message:
    if "v" not in obj:
        raise DecodeError("frame is missing the protocol version field 'v'", offset)
    if obj["v"] != PROTOCOL_VERSION:
        raise VersionError(
            f"protocol version {obj['v']!r} not supported; this build speaks {PROTOCOL_VERSION}",
            offset,
        )
    kind = obj.get("kind")
    cls = MESSAGE_TYPES.get(kind)
    if cls is None:
        raise UnknownKindError(
            f"unknown message kind {kind!r}; known kinds: {', '.join(sorted(MESSAGE_TYPES))}",
            offset,
        )
    try:
        return cls.from_obj(obj)
    except (KeyError, TypeError) as exc:
        raise DecodeError(f"malformed {kind} frame: {exc}", offset)


def decode(frame: bytes | str, offset: int = 0) -> Message:
    if isinstance(frame, bytes):
        frame = frame.decode("utf-8")
    try:
        obj = json.loads(frame)
    except json.JSONDecodeError as exc:
        raise DecodeError(f"invalid JSON: {exc.msg}", offset + exc.pos)
    if not isinstance(obj, dict):
        raise DecodeError("frame must be a JSON object", offset)
    return decode_obj(obj, offset)


class FrameDecoder:
    """Incremental decoder over a byte stream; reports absolute byte offsets."""

    def __init__(self) -> None:
        self._buffer = b""
        self._consumed = 0

    def feed(self, data: bytes) -> list[Message]:
        self._buffer += data
        messages: list[Message] = []
        while True:
            newline = self._buffer.find(b"\n")
            if newline < 0:
                break
            frame = self._buffer[:newline]
            frame_offset = self._consumed
            self._buffer = self._buffer[newline + 1 :]
            self._consumed += newline + 1
            if frame.strip():
                messages.append(decode(frame, frame_offset))
        return messages
