"""Partial observability rules.

A bot sees block entries only for (a) blocks in the room it currently
occupies, (b) blocks in a room whose door it is standing on, when its role
can sense at doors, and (c) blocks on corridor cells in straight, unblocked
line of sight from its own corridor position. Colors are masked for
color-blind roles; sensing noise independently corrupts each reported color
with a probability drawn from a keyed, order-independent stream.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Any

from .types import Block, Cell, CellKind, UNKNOWN_COLOR, WorldState, iter_line


def _noise_words(seed: int, tick: int, player_id: int, block_id: int) -> tuple[float, int]:
    """Keyed draw for sensing noise: a uniform in [0,1) and a color pick.

    Keying by (seed, tick, player, block) keeps observation calls pure:
    recomputing a view never disturbs determinism, and draws are identical
    across platforms.
    """
    digest = hashlib.sha256(f"{seed}:{tick}:{player_id}:{block_id}".encode("utf-8")).digest()
    u = int.from_bytes(digest[:8], "big") / 2**64
    pick = int.from_bytes(digest[8:12], "big")
    return u, pick


@dataclass
class Observation:
    tick: int
    player_id: int
    position: Cell
    role_id: str
    battery: int
    move_cooldown: int
    held: list[dict[str, Any]]
    bots: list[dict[str, Any]]
    blocks: list[dict[str, Any]]  # [{"id", "cell", "color"}], color int or "unknown"
    sequence_next: int
    blackout: bool
    geometry: dict[str, Any] | None = field(default=None)

    def block_entries_json(self) -> list[dict[str, Any]]:
        return [dict(e) for e in self.blocks]

    def to_json_obj(self) -> dict[str, Any]:
        return {
            "tick": self.tick,
            "player": self.player_id,
            "you": {
                "position": list(self.position),
                "role": self.role_id,
                "battery": self.battery,
                "move_cooldown": self.move_cooldown,
                "held": self.held,
            },
            "bots": self.bots,
            "blocks": self.blocks,
            "sequence_next": self.sequence_next,
            "blackout": self.blackout,
            "geometry": self.geometry,
        }

    @classmethod
    def from_json_obj(cls, obj: dict[str, Any]) -> "Observation":
        you = obj["you"]
        return cls(
            tick=obj["tick"],
            player_id=obj["player"],
            position=tuple(you["position"]),
            role_id=you["role"],
            battery=you["battery"],
            move_cooldown=you["move_cooldown"],
            held=you["held"],
            bots=obj["bots"],
            blocks=obj["blocks"],
            sequence_next=obj["sequence_next"],
            blackout=obj["blackout"],
            geometry=obj.get("geometry"),
        )


def licensed_blocks(state: WorldState, player_id: int) -> list[Block]:
    """Placed blocks the visibility rules allow this bot to see, by block id."""
    bot = state.bots[player_id]
    pos = bot.position
    room = state.room_at(pos)
    role = state.roles[bot.role_id]
    visible: dict[int, Block] = {}
    if room is not None:
        for block in state.blocks.values():
            if block.cell is not None and room.contains(block.cell):
                visible[block.block_id] = block
    else:
        if role.can_sense_at_door:
            for adjacent_room in state.rooms_with_door(pos):
                for block in state.blocks.values():
                    if block.cell is not None and adjacent_room.contains(block.cell):
                        visible[block.block_id] = block
        for block in state.blocks.values():
            if block.cell is None or block.block_id in visible:
                continue
            if state.room_at(block.cell) is not None:
                continue
            if _corridor_sightline(state, pos, block.cell):
                visible[block.block_id] = block
    return [visible[bid] for bid in sorted(visible)]


def _corridor_sightline(state: WorldState, a: Cell, b: Cell) -> bool:
    if a[0] != b[0] and a[1] != b[1]:
        return False
    for cell in iter_line(a, b):
        if state.cell(cell) not in CellKind.PASSABLE:
            return False
        if state.room_at(cell) is not None:
            return False
    return True


def perceived_color(state: WorldState, player_id: int, block: Block) -> int | str:
    role = state.roles[state.bots[player_id].role_id]
    if role.color_vision == "none":
        return UNKNOWN_COLOR
    prob = state.effective_noise()
    if prob > 0.0:
        u, pick = _noise_words(state.seed, state.tick, player_id, block.block_id)
        if u < prob:
            return pick % state.palette_size
    return block.color


def visible_view(state: WorldState, player_id: int) -> Observation:
    """Observation for one live bot; always well-defined and side-effect free."""
    bot = state.bots[player_id]
    role = state.roles[bot.role_id]
    geometry: dict[str, Any] | None = None
    if not state.blackout_active:
        geometry = {
            "width": state.static_map.width,
            "height": state.static_map.height,
            "cells": ["".join(row) for row in state.grid],
            "rooms": [
                {
                    "id": r.room_id,
                    "rect": list(r.rect),
                    "doors": [list(d) for d in r.doors],
                }
                for r in state.static_map.rooms
            ],
        }
    held_entries = []
    for bid in bot.held:
        color = state.blocks[bid].color if role.color_vision == "full" else UNKNOWN_COLOR
        held_entries.append({"id": bid, "color": color})
    block_entries = [
        {
            "id": block.block_id,
            "cell": list(block.cell),  # licensed blocks are always placed
            "color": perceived_color(state, player_id, block),
        }
        for block in licensed_blocks(state, player_id)
    ]
    return Observation(
        tick=state.tick,
        player_id=player_id,
        position=bot.position,
        role_id=bot.role_id,
        battery=bot.battery,
        move_cooldown=bot.move_cooldown,
        held=held_entries,
        bots=[
            {"player": pid, "position": list(state.bots[pid].position)}
            for pid in sorted(state.bots)
        ],
        blocks=block_entries,
        sequence_next=state.sequence.next_index,
        blackout=state.blackout_active,
        geometry=geometry,
    )
