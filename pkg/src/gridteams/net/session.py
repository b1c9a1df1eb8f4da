"""Authoritative session host, transport-agnostic.

The engine is a synchronous state machine: drivers (the in-memory lockstep
runner and the asyncio network server) feed it decoded client messages and
pump its outbound messages. No client message mutates world state directly;
only actions interpreted by the world engine do. Within a tick the latest
action per player wins and earlier ones are rejected as superseded.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Any

from .. import PROTOCOL_VERSION, events as ev
from ..events import EventRecord
from ..scenario.model import Scenario, scenario_digest
from ..telemetry.log import EventLogWriter
from ..telemetry.surveys import SurveyError, SurveyResponse, survey_instruments, validate_survey
from ..world.engine import chat_problem, chat_recipients
from ..world.sim import SimRun
from ..world.types import Action, WorldState
from .protocol import (
    Ack,
    ActionMsg,
    ChatDeliverMsg,
    ChatSendMsg,
    ErrorMsg,
    Join,
    Message,
    ObservationMsg,
    Reject,
    SessionEventMsg,
    SurveyPromptMsg,
    SurveyResponseMsg,
    Welcome,
)

# Outbound routing: (player id, message); BROADCAST sends to every player.
BROADCAST = 0
Outbound = tuple[int, Message]


class ChatRouteError(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def route_chat(
    state: WorldState, sender: int, chat: ChatSendMsg, tick: int | None = None
) -> tuple[list[ChatDeliverMsg], EventRecord]:
    """Resolve one communicative act to its deliveries and its log record.

    to="all" delivers to every other player; to=p delivers only to p. The
    record keeps both source and intended recipient. Invalid sends raise
    ``ChatRouteError``; the attempt is still logged by the caller via the
    engine's rejected action event. ``tick`` defaults to the state's tick;
    the session passes the pre-step tick the act belongs to.
    """
    if tick is None:
        tick = state.tick
    problem = chat_problem(state, sender, chat.to, chat.body)
    if problem is not None:
        raise ChatRouteError(problem)
    deliveries = [
        ChatDeliverMsg(sender=sender, to=chat.to, body=chat.body, tick=tick)
        for _recipient in chat_recipients(state, sender, chat.to)
    ]
    record = EventRecord(
        tick=tick,
        kind=ev.CHAT_SEND,
        payload={"from": sender, "to": chat.to, "body": chat.body},
    )
    return deliveries, record


@dataclass
class SlotState:
    name: str
    role: str
    fill: str
    player_id: int
    taken_by: str | None = None  # "human" | "agent" once filled
    display_name: str = ""
    reconnect_token: str = ""
    connected: bool = False


@dataclass
class SessionResult:
    session_id: str
    completion: bool
    duration_ticks: int
    final_score: int
    final_next_index: int
    per_player: dict[int, dict[str, Any]] = field(default_factory=dict)
    log_path: str | None = None


class SessionEngine:
    def __init__(
        self,
        scenario: Scenario,
        session_id: str,
        seed: int,
        sink: EventLogWriter,
        auth_tokens: dict[str, str] | None = None,
        points_per_correct: int = 10,
        tick_rate_override: int | None = None,
    ):
        self.scenario = scenario.resolve(seed_override=seed)
        self.session_id = session_id
        self.seed = seed
        self.sink = sink
        self.auth_tokens = auth_tokens or {}
        self.points_per_correct = points_per_correct
        self.tick_rate = tick_rate_override or self.scenario.tick_rate
        self.sim = SimRun(self.scenario.to_world_setup(), seed)
        self.slots = [
            SlotState(
                name=s.name,
                role=s.role,
                fill=s.fill,
                player_id=i + 1,
                reconnect_token=self._token(s.name),
            )
            for i, s in enumerate(self.scenario.slots)
        ]
        self.started = False
        self.ended = False
        self.closed = False
        self.surveys_received: set[tuple[int, str]] = set()  # (player, instrument)
        self.result: SessionResult | None = None
        self._mailbox: dict[int, tuple[int | None, Action]] = {}
        self._pending_events: list[EventRecord] = []
        self._mid_tick = False
        self._observations: dict[int, Any] = {}
        self._digest = scenario_digest(self.scenario)

    # -- lobby ------------------------------------------------------------

    def _token(self, slot_name: str) -> str:
        raw = f"{self.session_id}:{slot_name}:{self.seed}"
        return hashlib.sha256(raw.encode("utf-8")).hexdigest()[:16]

    def slot_by_player(self, player_id: int) -> SlotState:
        return self.slots[player_id - 1]

    def handle_join(self, join: Join) -> Welcome | ErrorMsg:
        """Assign a slot (requested or first compatible open one).

        After start, only reconnects (by token) are accepted: late joins are
        disabled by default.
        """
        if join.token:
            for slot in self.slots:
                if slot.taken_by and slot.reconnect_token == join.token:
                    slot.connected = True
                    self._log_lifecycle(ev.RECONNECT, slot)
                    return self._welcome(slot)
        if self.started:
            return ErrorMsg(code="SessionStarted", message="session already started; joins are closed")
        if join.player_kind not in ("human", "agent"):
            return ErrorMsg(code="BadKind", message="player_kind must be 'human' or 'agent'")
        if join.slot is not None:
            matches = [s for s in self.slots if s.name == join.slot]
            if not matches:
                return ErrorMsg(code="UnknownSlot", message=f"no slot named {join.slot!r}")
            slot = matches[0]
            if slot.taken_by is not None:
                return ErrorMsg(code="SlotTaken", message=f"slot {slot.name} is already filled")
            if slot.fill != "open" and slot.fill != join.player_kind:
                return ErrorMsg(
                    code="KindMismatch",
                    message=f"slot {slot.name} is reserved for {slot.fill} players",
                )
        else:
            open_slots = [s for s in self.slots if s.taken_by is None]
            if not open_slots:
                return ErrorMsg(code="SessionFull", message="all slots are filled")
            compatible = [s for s in open_slots if s.fill in ("open", join.player_kind)]
            if not compatible:
                return ErrorMsg(
                    code="KindMismatch",
                    message=f"remaining slots are reserved for other player kinds",
                )
            slot = compatible[0]
        expected = self.auth_tokens.get(slot.name)
        if expected is not None and join.token != expected:
            return ErrorMsg(code="BadToken", message=f"slot {slot.name} requires a valid token")
        slot.taken_by = join.player_kind
        slot.display_name = join.display_name
        slot.connected = True
        return self._welcome(slot)

    def _welcome(self, slot: SlotState) -> Welcome:
        role = self.scenario.role_map()[slot.role]
        return Welcome(
            player=slot.player_id,
            slot=slot.name,
            role=role.to_json_obj(),
            scenario_digest=self._digest,
            session=self.session_id,
            tick_rate=self.tick_rate,
            time_limit_ticks=self.scenario.time_limit_ticks,
            sequence=tuple(self.scenario.sequence),
            palette_size=self.scenario.palette_size,
            chat_mode=self.scenario.chat_mode,
            chat_catalog=tuple(self.scenario.chat_catalog),
            reconnect_token=slot.reconnect_token,
            survey_tasks=tuple(self.scenario.survey_tasks),
        )

    @property
    def all_filled(self) -> bool:
        return all(s.taken_by is not None for s in self.slots)

    def live_players(self) -> list[int]:
        return [s.player_id for s in self.slots if s.taken_by is not None]

    # -- lifecycle ----------------------------------------------------------

    def start(self) -> list[Outbound]:
        """Write the log preamble and announce the session start."""
        if self.started:
            raise RuntimeError("session already started")
        if not self.all_filled:
            raise RuntimeError("cannot start: open slots remain")
        self.started = True
        self.sink.append(EventRecord(tick=0, kind=ev.SESSION_META, payload=self._meta_payload()))
        for slot in self.slots:
            self._log_lifecycle(ev.JOIN, slot)
        self.sink.append(
            EventRecord(
                tick=0,
                kind=ev.SESSION_START,
                payload={"tick_rate": self.tick_rate, "time_limit": self.scenario.time_limit_ticks},
            )
        )
        self.sink.flush()
        return [(BROADCAST, SessionEventMsg(event="start", tick=0, payload={}))]

    def _log_lifecycle(self, kind: str, slot: SlotState) -> None:
        if not self.started:
            return
        self.sink.append(
            EventRecord(
                tick=self.sim.state.tick,
                kind=kind,
                payload={
                    "player": slot.player_id,
                    "slot": slot.name,
                    "kind": slot.taken_by,
                    "display_name": slot.display_name,
                },
            )
        )

    def _meta_payload(self) -> dict[str, Any]:
        blocks_per_room: dict[str, int] = {}
        gm = self.scenario.map_spec
        for room in gm.rooms:
            blocks_per_room[room.room_id] = sum(
                1 for b in self.scenario.blocks if room.contains(b.cell)
            )
        return {
            "session": self.session_id,
            "scenario": self.scenario.to_json_obj(),
            "scenario_digest": self._digest,
            "seed": self.seed,
            "protocol_version": PROTOCOL_VERSION,
            "tick_rate": self.tick_rate,
            "time_limit_ticks": self.scenario.time_limit_ticks,
            "goal_sequence": list(self.scenario.sequence),
            "blocks_per_room": blocks_per_room,
            "initial_blocks": [b.to_json_obj() for b in self.scenario.blocks],
            "slots": [
                {
                    "name": s.name,
                    "role": s.role,
                    "fill": s.fill,
                    "player": s.player_id,
                    "kind": s.taken_by,
                    "display_name": s.display_name,
                }
                for s in self.slots
            ],
            "roles": [r.to_json_obj() for r in self.scenario.roles],
            "survey_tasks": list(self.scenario.survey_tasks),
        }

    def on_disconnect(self, player_id: int) -> None:
        slot = self.slot_by_player(player_id)
        if slot.connected:
            slot.connected = False
            if self.started and not self.closed:
                self.sink.append(
                    EventRecord(
                        tick=self.sim.state.tick,
                        kind=ev.DISCONNECT,
                        payload={"player": player_id, "slot": slot.name},
                    )
                )

    # -- per-tick pipeline --------------------------------------------------

    def tick_begin(self) -> list[Outbound]:
        """Apply perturbations, fan out fresh observations."""
        if not self.started or self.ended:
            raise RuntimeError("session not running")
        start = self.sim.begin_tick()
        self.sink.append_all(start.events)
        out: list[Outbound] = []
        for record in start.events:
            if record.kind == ev.PERTURBATION:
                out.append(
                    (
                        BROADCAST,
                        SessionEventMsg(
                            event="perturbation", tick=record.tick, payload=record.payload
                        ),
                    )
                )
        self._observations = start.observations
        tick = self.sim.state.tick
        for pid, obs in start.observations.items():
            out.append((pid, ObservationMsg(tick=tick, observation=obs.to_json_obj())))
        self._mid_tick = True
        self._mailbox.clear()
        return out

    def on_message(self, player_id: int, message: Message) -> list[Outbound]:
        """Handle one decoded client message outside of join."""
        tick = self.sim.state.tick
        if isinstance(message, ActionMsg):
            if self.ended or not self._mid_tick:
                return [(player_id, Reject(reason="not_running", ref=message.ref, tick=tick))]
            if message.tick is not None and message.tick != tick:
                return [(player_id, Reject(reason="stale_tick", ref=message.ref, tick=tick))]
            try:
                action = Action.from_json_obj(message.action)
            except (KeyError, TypeError):
                return [(player_id, Reject(reason="bad_action", ref=message.ref, tick=tick))]
            return self._post_action(player_id, message.ref, action)
        if isinstance(message, ChatSendMsg):
            if self.ended or not self._mid_tick:
                return [(player_id, Reject(reason="not_running", tick=tick))]
            action = Action.chat(message.to, message.body)
            return self._post_action(player_id, None, action)
        if isinstance(message, SurveyResponseMsg):
            return self._on_survey(player_id, message)
        if isinstance(message, Join):
            return [(player_id, ErrorMsg(code="AlreadyJoined", message="connection already has a slot"))]
        return [(player_id, ErrorMsg(code="UnexpectedKind", message=f"unexpected {message.KIND}"))]

    def _post_action(self, player_id: int, ref: int | None, action: Action) -> list[Outbound]:
        out: list[Outbound] = []
        previous = self._mailbox.get(player_id)
        if previous is not None:
            old_ref, old_action = previous
            self.sink.append(
                EventRecord(
                    tick=self.sim.state.tick,
                    kind=ev.ACTION_SUPERSEDED,
                    payload={"player": player_id, "action": old_action.to_json_obj()},
                )
            )
            out.append(
                (player_id, Reject(reason="superseded", ref=old_ref, tick=self.sim.state.tick))
            )
        self._mailbox[player_id] = (ref, action)
        return out

    def actions_pending(self) -> set[int]:
        return set(self._mailbox)

    def tick_finish(self) -> list[Outbound]:
        """Step the world with the collected mailbox and route the results."""
        if not self._mid_tick:
            raise RuntimeError("tick_begin must run first")
        self._mid_tick = False
        tick = self.sim.state.tick
        refs = {pid: ref for pid, (ref, _a) in self._mailbox.items()}
        actions = {pid: action for pid, (_r, action) in self._mailbox.items()}
        events = self.sim.complete_tick(actions)
        out: list[Outbound] = []
        for record in events:
            self.sink.append(record)
            p = record.payload
            if record.kind == ev.ACTION:
                pid = p["player"]
                if pid in refs:
                    if p["ok"]:
                        out.append((pid, Ack(tick=tick, ref=refs[pid])))
                    else:
                        out.append(
                            (pid, Reject(reason=p["reason"], tick=tick, ref=refs[pid]))
                        )
                if p["ok"] and p["action"]["kind"] == "chat":
                    out.extend(self._route_accepted_chat(pid, p["action"], tick))
            elif record.kind == ev.SCORE and p["outcome"] == "correct":
                out.append(
                    (
                        BROADCAST,
                        SessionEventMsg(
                            event="sequence_advance",
                            tick=tick,
                            payload={
                                "next_index": p["next_index"],
                                "player": p["player"],
                                "score": p["next_index"] * self.points_per_correct,
                            },
                        ),
                    )
                )
        self.sink.flush()
        if self.sim.ended:
            out.extend(self._finish())
        return out

    def _route_accepted_chat(
        self, sender: int, action_obj: dict[str, Any], tick: int
    ) -> list[Outbound]:
        chat = ChatSendMsg(to=action_obj["to"], body=action_obj["body"])
        deliveries, record = route_chat(self.sim.state, sender, chat, tick=tick)
        self.sink.append(record)
        out: list[Outbound] = []
        recipients = chat_recipients(self.sim.state, sender, chat.to)
        for recipient, delivery in zip(recipients, deliveries):
            self.sink.append(
                EventRecord(
                    tick=record.tick,
                    kind=ev.CHAT_DELIVER,
                    payload={
                        "from": sender,
                        "to": chat.to,
                        "body": chat.body,
                        "recipient": recipient,
                    },
                )
            )
            out.append((recipient, delivery))
        return out

    def _finish(self) -> list[Outbound]:
        self.ended = True
        state = self.sim.state
        completion = self.sim.end_reason == "completed"
        correct_total = sum(state.correct_drops.values())
        score = correct_total * self.points_per_correct
        end_payload = {
            "reason": self.sim.end_reason,
            "duration": self.sim.duration,
            "completion": completion,
            "final_next_index": state.sequence.next_index,
            "score": score,
        }
        self.sink.append(EventRecord(tick=state.tick, kind=ev.END, payload=end_payload))
        self.sink.flush()
        self.result = SessionResult(
            session_id=self.session_id,
            completion=completion,
            duration_ticks=self.sim.duration,
            final_score=score,
            final_next_index=state.sequence.next_index,
        )
        out: list[Outbound] = [
            (BROADCAST, SessionEventMsg(event="end", tick=state.tick, payload=end_payload))
        ]
        instruments = survey_instruments(list(self.scenario.survey_tasks))
        for slot in self.slots:
            if slot.taken_by == "human":
                for instrument in instruments:
                    out.append((slot.player_id, SurveyPromptMsg(instrument=instrument)))
        return out

    def _on_survey(self, player_id: int, message: SurveyResponseMsg) -> list[Outbound]:
        if not self.ended:
            return [(player_id, Reject(reason="session_not_ended"))]
        response = SurveyResponse(
            player_id=player_id,
            instrument=message.instrument,
            workflow_choice=message.workflow_choice,
            relatedness_items=list(message.items),
        )
        try:
            validate_survey(response, self._meta_payload())
        except SurveyError as exc:
            return [(player_id, Reject(reason=exc.code, message=str(exc)))]
        self.sink.append(
            EventRecord(
                tick=self.sim.state.tick, kind=ev.SURVEY, payload=response.to_json_obj()
            )
        )
        self.sink.flush()
        self.surveys_received.add((player_id, response.instrument))
        return [(player_id, Ack(tick=self.sim.state.tick))]

    def close(self) -> SessionResult:
        """Write the closing record and seal the log."""
        if self.closed:
            assert self.result is not None
            return self.result
        self.closed = True
        if self.result is None:
            # aborted before a natural end
            self.result = SessionResult(
                session_id=self.session_id,
                completion=False,
                duration_ticks=self.sim.duration,
                final_score=sum(self.sim.state.correct_drops.values()) * self.points_per_correct,
                final_next_index=self.sim.state.sequence.next_index,
            )
        self.sink.append(
            EventRecord(
                tick=self.sim.state.tick,
                kind=ev.SESSION_END,
                payload={
                    "final_digest": self.sim.final_digest(),
                    "duration": self.sim.duration,
                    "completion": self.result.completion,
                },
            )
        )
        self.sink.close()
        self.result.log_path = str(self.sink.path)
        return self.result
