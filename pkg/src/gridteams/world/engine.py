"""Deterministic discrete-tick world engine.

``step`` advances the state by one tick, applying at most one action per bot
under the canonical ordering rule: same-tick actions execute in ascending
player id, each seeing the effects of the ones before it. Every attempted
action produces exactly one ``action`` event (success or rejection), plus
derived events (score, battery_empty, room_entered) where applicable.
"""

from __future__ import annotations

from typing import Any, Iterable

from ..events import (
    ACTION,
    BATTERY_EMPTY,
    PERTURBATION,
    ROOM_ENTERED,
    SCORE,
    EventRecord,
)
from .types import (
    Action,
    Block,
    Bot,
    Cell,
    CellKind,
    DIRECTIONS,
    GridMap,
    RoleSpec,
    TargetSequence,
    WorldState,
)


class EngineError(Exception):
    pass


class PerturbationError(EngineError):
    pass


class DropOutcome:
    CORRECT = "correct"
    INCORRECT = "incorrect"
    NON_SCORING = "non_scoring"


# Rejection reasons carried on action events.
R_UNKNOWN_PLAYER = "unknown_player"
R_BAD_ACTION = "bad_action"
R_CAPABILITY = "capability"
R_BATTERY_EMPTY = "battery_empty"
R_COOLDOWN = "cooldown"
R_OUT_OF_BOUNDS = "out_of_bounds"
R_IMPASSABLE = "impassable"
R_OCCUPIED = "occupied"
R_CAPACITY_FULL = "capacity_full"
R_NO_BLOCK = "no_block"
R_NOT_HOLDING = "not_holding"
R_NOT_ADJACENT = "not_adjacent"
R_NOT_BLOCKAGE = "not_blockage"
R_BAD_RECIPIENT = "bad_recipient"
R_CATALOG_ONLY = "catalog_only"
R_BAD_CATALOG_INDEX = "bad_catalog_index"
R_TOO_LONG = "too_long"

MAX_CHAT_BYTES = 1024

# Actions gated by an empty battery; chat and sense stay available.
BATTERY_GATED = {"move", "grab", "drop", "clear"}
# Accepted actions that change world state; everything else counts as idle.
TASKWORK_KINDS = {"move", "grab", "drop", "clear"}


def init_world(
    grid_map: GridMap,
    blocks: Iterable[tuple[int, int, Cell]],
    roles: dict[str, RoleSpec],
    bot_roles: list[str],
    sequence_colors: list[int],
    seed: int,
    palette_size: int,
    chat_mode: str = "free_text",
    chat_catalog: list[str] | None = None,
    collisions: bool = True,
    sense_noise_prob: float = 0.0,
) -> WorldState:
    """Build the tick-0 state. ``blocks`` yields (id, color, cell); bots spawn
    on the map's spawn cells in player-id order (player ids are 1-based)."""
    if len(bot_roles) > len(grid_map.spawns):
        raise EngineError("not enough spawn cells for the team")
    block_map: dict[int, Block] = {}
    for bid, color, cell in blocks:
        if bid in block_map:
            raise EngineError(f"duplicate block id {bid}")
        block_map[bid] = Block(block_id=bid, color=color, cell=cell)
    bots: dict[int, Bot] = {}
    for i, role_id in enumerate(bot_roles):
        pid = i + 1
        role = roles[role_id]
        bots[pid] = Bot(
            player_id=pid,
            role_id=role_id,
            position=grid_map.spawns[i],
            battery=role.battery_capacity,
        )
    state = WorldState(
        tick=0,
        grid=[list(row) for row in grid_map.rows],
        static_map=grid_map,
        blocks=block_map,
        bots=bots,
        roles=dict(roles),
        sequence=TargetSequence(colors=list(sequence_colors)),
        correct_drops={pid: 0 for pid in bots},
        incorrect_drops={pid: 0 for pid in bots},
        seed=seed,
        palette_size=palette_size,
        chat_mode=chat_mode,
        chat_catalog=list(chat_catalog or []),
        collisions=collisions,
        sense_noise_prob=sense_noise_prob,
        initial_block_count=len(block_map),
    )
    return state


def chat_recipients(state: WorldState, sender: int, to: str | int) -> list[int]:
    """Player ids a chat addressed to ``to`` is delivered to."""
    if to == "all":
        return [pid for pid in sorted(state.bots) if pid != sender]
    return [int(to)]


def chat_problem(state: WorldState, sender: int, to: str | int, body: dict[str, Any] | None) -> str | None:
    """Validation shared by the engine chat action and the server chat router.

    Returns a rejection reason or None when the chat is acceptable.
    """
    if to != "all" and (not isinstance(to, int) or to not in state.bots):
        return R_BAD_RECIPIENT
    if not isinstance(body, dict):
        return R_BAD_ACTION
    if "catalog" in body:
        idx = body["catalog"]
        if not isinstance(idx, int) or not (0 <= idx < len(state.chat_catalog)):
            return R_BAD_CATALOG_INDEX
        return None
    if "text" in body:
        if state.chat_mode == "predefined_only":
            return R_CATALOG_ONLY
        text = body["text"]
        if not isinstance(text, str):
            return R_BAD_ACTION
        if len(text.encode("utf-8")) > MAX_CHAT_BYTES:
            return R_TOO_LONG
        return None
    return R_BAD_ACTION


def chat_body_text(state: WorldState, body: dict[str, Any]) -> str:
    """Rendered text of a chat body (catalog entries resolve to their string)."""
    if "catalog" in body:
        return state.chat_catalog[body["catalog"]]
    return body["text"]


def score_drop(state: WorldState, player_id: int, block_id: int) -> str:
    """Resolve a drop at the bot's cell and apply its effects.

    Correct: cell is in the drop zone and the color matches the next needed
    color; the block is consumed and the sequence advances. Incorrect: in the
    drop zone with the wrong color; the block is consumed (wrong drops are
    costly by design) and the incorrect counter advances. Non-scoring: outside
    the drop zone; the block lands on the cell and stays grabbable.
    """
    bot = state.bots.get(player_id)
    if bot is None:
        raise EngineError(f"unknown player {player_id}")
    if block_id not in bot.held:
        raise EngineError(f"player {player_id} does not hold block {block_id}")
    block = state.blocks[block_id]
    bot.held.remove(block_id)
    block.held_by = None
    if state.cell(bot.position) == CellKind.DROP_ZONE:
        if block.color == state.sequence.needed_color:
            block.consumed = True
            state.sequence.next_index += 1
            state.correct_drops[player_id] += 1
            return DropOutcome.CORRECT
        block.consumed = True
        state.incorrect_drops[player_id] += 1
        return DropOutcome.INCORRECT
    block.cell = bot.position
    return DropOutcome.NON_SCORING


def apply_perturbation(state: WorldState, perturbation: dict[str, Any]) -> list[EventRecord]:
    """Apply one scheduled disruption.

    blockage: converts listed floor/door cells to blockages; cells occupied
    by a bot (or otherwise unconvertible) are skipped and reported.
    blackout: hides map geometry from observations for the duration.
    drain / noise: parameter changes that take effect next tick.
    """
    kind = perturbation.get("kind")
    payload: dict[str, Any] = {"kind": kind}
    if kind == "blockage":
        cells = [tuple(c) for c in perturbation["cells"]]
        for cell in cells:
            if not state.in_bounds(cell):
                raise PerturbationError(f"blockage cell {list(cell)} out of bounds")
        applied: list[Cell] = []
        skipped: list[Cell] = []
        for cell in cells:
            cur = state.cell(cell)
            if cur not in (CellKind.FLOOR, CellKind.DOOR) or state.occupied(cell) is not None:
                skipped.append(cell)
                continue
            state.blockage_prior[cell] = cur
            state.set_cell(cell, CellKind.BLOCKAGE)
            applied.append(cell)
        payload["applied"] = [list(c) for c in applied]
        payload["skipped"] = [list(c) for c in skipped]
    elif kind == "blackout":
        duration = int(perturbation["duration"])
        if duration < 0:
            raise PerturbationError("blackout duration must be >= 0")
        state.blackout_until = max(state.blackout_until, state.tick + duration)
        payload["duration"] = duration
        payload["until"] = state.blackout_until
    elif kind == "drain":
        rate = int(perturbation["rate"])
        if rate < 0:
            raise PerturbationError("drain rate must be >= 0")
        state.drain_override = (rate, state.tick + 1)
        payload["rate"] = rate
    elif kind == "noise":
        prob = float(perturbation["prob"])
        if not (0.0 <= prob <= 1.0):
            raise PerturbationError("noise prob must be in [0, 1]")
        state.noise_override = (prob, state.tick + 1)
        payload["prob"] = prob
    else:
        raise PerturbationError(f"unknown perturbation kind {kind!r}")
    return [EventRecord(tick=state.tick, kind=PERTURBATION, payload=payload)]


def step(state: WorldState, actions: dict[int, Action]) -> list[EventRecord]:
    """Advance the world one tick, mutating ``state`` in place.

    Events are stamped with the tick during which the actions were taken
    (the pre-increment tick).
    """
    tick = state.tick
    events: list[EventRecord] = []
    moved: set[int] = set()

    for pid in sorted(actions):
        action = actions[pid]
        if pid not in state.bots:
            events.append(_action_event(tick, pid, action, ok=False, reason=R_UNKNOWN_PLAYER))
            continue
        events.extend(_apply_action(state, tick, pid, action, moved))

    for pid, bot in state.bots.items():
        if pid in moved:
            bot.move_cooldown = state.roles[bot.role_id].move_period - 1
        elif bot.move_cooldown > 0:
            bot.move_cooldown -= 1

    state.tick = tick + 1
    return events


def _action_event(
    tick: int,
    player_id: int,
    action: Action,
    ok: bool,
    reason: str | None = None,
    detail: dict[str, Any] | None = None,
) -> EventRecord:
    payload: dict[str, Any] = {"player": player_id, "action": action.to_json_obj(), "ok": ok}
    if reason is not None:
        payload["reason"] = reason
    if detail:
        payload["detail"] = detail
    return EventRecord(tick=tick, kind=ACTION, payload=payload)


def _apply_action(
    state: WorldState, tick: int, pid: int, action: Action, moved: set[int]
) -> list[EventRecord]:
    bot = state.bots[pid]
    role = state.roles[bot.role_id]

    def reject(reason: str) -> list[EventRecord]:
        return [_action_event(tick, pid, action, ok=False, reason=reason)]

    if action.kind not in Action.KINDS:
        return reject(R_BAD_ACTION)
    if action.kind == "noop":
        return [_action_event(tick, pid, action, ok=True)]
    if action.kind in BATTERY_GATED and bot.battery <= 0 and role.battery_capacity > 0:
        return reject(R_BATTERY_EMPTY)

    if action.kind == "move":
        delta = DIRECTIONS.get(action.direction or "")
        if delta is None:
            return reject(R_BAD_ACTION)
        if bot.move_cooldown > 0:
            return reject(R_COOLDOWN)
        target = (bot.position[0] + delta[0], bot.position[1] + delta[1])
        if not state.in_bounds(target):
            return reject(R_OUT_OF_BOUNDS)
        if state.cell(target) not in CellKind.PASSABLE:
            return reject(R_IMPASSABLE)
        if state.collisions and state.occupied(target) is not None:
            return reject(R_OCCUPIED)
        prev_room = state.room_at(bot.position)
        prev = bot.position
        bot.position = target
        moved.add(pid)
        drain = state.effective_drain(role)
        crossed_to_empty = False
        if drain > 0 and bot.battery > 0:
            bot.battery = max(0, bot.battery - drain)
            crossed_to_empty = bot.battery == 0
        events = [
            _action_event(tick, pid, action, ok=True, detail={"from": list(prev), "to": list(target)})
        ]
        new_room = state.room_at(target)
        if new_room is not None and new_room is not prev_room:
            events.append(
                EventRecord(tick=tick, kind=ROOM_ENTERED, payload={"player": pid, "room": new_room.room_id})
            )
        if crossed_to_empty:
            events.append(EventRecord(tick=tick, kind=BATTERY_EMPTY, payload={"player": pid}))
        return events

    if action.kind == "grab":
        if role.carry_capacity == 0:
            return reject(R_CAPABILITY)
        if len(bot.held) >= role.carry_capacity:
            return reject(R_CAPACITY_FULL)
        block = state.blocks.get(action.block) if action.block is not None else None
        if block is None or not block.placed or block.cell != bot.position:
            return reject(R_NO_BLOCK)
        block.cell = None
        block.held_by = pid
        bot.held.append(block.block_id)
        return [_action_event(tick, pid, action, ok=True, detail={"block": block.block_id})]

    if action.kind == "drop":
        if not bot.held:
            return reject(R_NOT_HOLDING)
        block_id = bot.held[0]
        color = state.blocks[block_id].color
        outcome = score_drop(state, pid, block_id)
        events = [_action_event(tick, pid, action, ok=True, detail={"block": block_id})]
        events.append(
            EventRecord(
                tick=tick,
                kind=SCORE,
                payload={
                    "player": pid,
                    "block": block_id,
                    "color": color,
                    "outcome": outcome,
                    "cell": list(bot.position),
                    "next_index": state.sequence.next_index,
                },
            )
        )
        return events

    if action.kind == "sense":
        from .visibility import visible_view  # local import: visibility depends on types only

        obs = visible_view(state, pid)
        return [
            _action_event(
                tick, pid, action, ok=True, detail={"blocks": obs.block_entries_json()}
            )
        ]

    if action.kind == "clear":
        if not role.can_clear_blockage:
            return reject(R_CAPABILITY)
        target = action.cell
        if target is None or not state.in_bounds(target):
            return reject(R_OUT_OF_BOUNDS)
        if abs(target[0] - bot.position[0]) + abs(target[1] - bot.position[1]) != 1:
            return reject(R_NOT_ADJACENT)
        if state.cell(target) != CellKind.BLOCKAGE:
            return reject(R_NOT_BLOCKAGE)
        restored = state.blockage_prior.pop(target, CellKind.FLOOR)
        state.set_cell(target, restored)
        return [_action_event(tick, pid, action, ok=True, detail={"cell": list(target)})]

    if action.kind == "chat":
        problem = chat_problem(state, pid, action.to, action.body)
        if problem is not None:
            return reject(problem)
        return [_action_event(tick, pid, action, ok=True)]

    return reject(R_BAD_ACTION)
