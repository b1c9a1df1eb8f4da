"""Domain types for the grid world.

Coordinates are (x, y) with x the column and y the row; (0, 0) is the top
left. The map is stored as rows of single-character cell kinds so that
scenario files stay diffable and the canonical state serialization stays
stable. Rooms are rectangles of floor cells; their door cells sit in the
wall ring immediately around the rectangle and are listed per room.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Iterable


class CellKind:
    FLOOR = "."
    WALL = "#"
    DOOR = "D"
    DROP_ZONE = "Z"
    BLOCKAGE = "X"

    PASSABLE = {FLOOR, DOOR, DROP_ZONE}
    ALL = {FLOOR, WALL, DOOR, DROP_ZONE, BLOCKAGE}


Cell = tuple[int, int]

DIRECTIONS: dict[str, Cell] = {
    "north": (0, -1),
    "south": (0, 1),
    "east": (1, 0),
    "west": (-1, 0),
}

UNKNOWN_COLOR = "unknown"


@dataclass(frozen=True)
class Room:
    room_id: str
    rect: tuple[int, int, int, int]  # x, y, width, height of the floor area
    doors: tuple[Cell, ...]

    def interior_cells(self) -> list[Cell]:
        x, y, w, h = self.rect
        return [(cx, cy) for cy in range(y, y + h) for cx in range(x, x + w)]

    def contains(self, cell: Cell) -> bool:
        x, y, w, h = self.rect
        return x <= cell[0] < x + w and y <= cell[1] < y + h


@dataclass(frozen=True)
class GridMap:
    width: int
    height: int
    rows: tuple[str, ...]
    rooms: tuple[Room, ...]
    spawns: tuple[Cell, ...]

    def cell(self, cell: Cell) -> str:
        return self.rows[cell[1]][cell[0]]

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    def cells_of_kind(self, kind: str) -> list[Cell]:
        return [
            (x, y)
            for y, row in enumerate(self.rows)
            for x, ch in enumerate(row)
            if ch == kind
        ]

    def to_json_obj(self) -> dict[str, Any]:
        return {
            "width": self.width,
            "height": self.height,
            "cells": list(self.rows),
            "rooms": [
                {"id": r.room_id, "rect": list(r.rect), "doors": [list(d) for d in r.doors]}
                for r in self.rooms
            ],
            "spawns": [list(s) for s in self.spawns],
        }

    @classmethod
    def from_json_obj(cls, obj: dict[str, Any]) -> "GridMap":
        rooms = tuple(
            Room(
                room_id=r["id"],
                rect=tuple(r["rect"]),
                doors=tuple(tuple(d) for d in r["doors"]),
            )
            for r in obj["rooms"]
        )
        rows = tuple(obj["cells"])
        return cls(
            width=obj["width"],
            height=obj["height"],
            rows=rows,
            rooms=rooms,
            spawns=tuple(tuple(s) for s in obj.get("spawns", [])),
        )


@dataclass(frozen=True)
class RoleSpec:
    """Capability profile for a team role. Handicaps manufacture interdependence."""

    role_id: str
    carry_capacity: int = 1
    color_vision: str = "full"  # "full" | "none"
    can_sense_at_door: bool = False
    can_clear_blockage: bool = False
    move_period: int = 1  # ticks per cell
    battery_capacity: int = 100
    battery_drain_per_move: int = 0

    def __post_init__(self) -> None:
        if self.move_period < 1:
            raise ValueError("move_period must be >= 1")
        if self.battery_capacity < 0 or self.battery_drain_per_move < 0:
            raise ValueError("battery values must be >= 0")
        if self.carry_capacity < 0:
            raise ValueError("carry_capacity must be >= 0")
        if self.color_vision not in ("full", "none"):
            raise ValueError("color_vision must be 'full' or 'none'")

    def to_json_obj(self) -> dict[str, Any]:
        return {
            "id": self.role_id,
            "carry_capacity": self.carry_capacity,
            "color_vision": self.color_vision,
            "can_sense_at_door": self.can_sense_at_door,
            "can_clear_blockage": self.can_clear_blockage,
            "move_period": self.move_period,
            "battery_capacity": self.battery_capacity,
            "battery_drain_per_move": self.battery_drain_per_move,
        }

    @classmethod
    def from_json_obj(cls, obj: dict[str, Any]) -> "RoleSpec":
        return cls(
            role_id=obj["id"],
            carry_capacity=obj.get("carry_capacity", 1),
            color_vision=obj.get("color_vision", "full"),
            can_sense_at_door=obj.get("can_sense_at_door", False),
            can_clear_blockage=obj.get("can_clear_blockage", False),
            move_period=obj.get("move_period", 1),
            battery_capacity=obj.get("battery_capacity", 100),
            battery_drain_per_move=obj.get("battery_drain_per_move", 0),
        )


@dataclass
class Block:
    """A colored block. Exactly one of cell / held_by / consumed at a time."""

    block_id: int
    color: int
    cell: Cell | None = None
    held_by: int | None = None
    consumed: bool = False

    def location_variants(self) -> int:
        return (self.cell is not None) + (self.held_by is not None) + self.consumed

    @property
    def placed(self) -> bool:
        return self.cell is not None


@dataclass
class Bot:
    player_id: int
    role_id: str
    position: Cell
    held: list[int] = field(default_factory=list)
    battery: int = 0
    move_cooldown: int = 0


@dataclass
class TargetSequence:
    colors: list[int]
    next_index: int = 0

    @property
    def complete(self) -> bool:
        return self.next_index >= len(self.colors)

    @property
    def needed_color(self) -> int | None:
        return None if self.complete else self.colors[self.next_index]


@dataclass
class WorldState:
    """Authoritative tick-indexed simulation state.

    The state is a pure function of (scenario, seed, ordered action history);
    every random draw (sensing noise) is keyed by (seed, tick, player, block)
    rather than consumed from a shared stream so that observation calls never
    perturb determinism.
    """

    tick: int
    grid: list[list[str]]  # mutable working copy of the map cells
    static_map: GridMap
    blocks: dict[int, Block]
    bots: dict[int, Bot]
    roles: dict[str, RoleSpec]
    sequence: TargetSequence
    correct_drops: dict[int, int]
    incorrect_drops: dict[int, int]
    seed: int
    palette_size: int
    chat_mode: str = "free_text"
    chat_catalog: list[str] = field(default_factory=list)
    collisions: bool = True
    sense_noise_prob: float = 0.0
    blackout_until: int = 0
    blockage_prior: dict[Cell, str] = field(default_factory=dict)
    # Perturbation parameter overrides; each takes effect at its recorded tick.
    drain_override: tuple[int, int] | None = None  # (rate, effective_from_tick)
    noise_override: tuple[float, int] | None = None
    initial_block_count: int = 0

    @property
    def blackout_active(self) -> bool:
        return self.tick < self.blackout_until

    def cell(self, cell: Cell) -> str:
        return self.grid[cell[1]][cell[0]]

    def set_cell(self, cell: Cell, kind: str) -> None:
        self.grid[cell[1]][cell[0]] = kind

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.static_map.width and 0 <= cell[1] < self.static_map.height

    def passable(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and self.cell(cell) in CellKind.PASSABLE

    def occupied(self, cell: Cell) -> int | None:
        for pid, bot in self.bots.items():
            if bot.position == cell:
                return pid
        return None

    def role_of(self, player_id: int) -> RoleSpec:
        return self.roles[self.bots[player_id].role_id]

    def effective_drain(self, role: RoleSpec) -> int:
        if self.drain_override is not None and self.tick >= self.drain_override[1]:
            return self.drain_override[0]
        return role.battery_drain_per_move

    def effective_noise(self) -> float:
        if self.noise_override is not None and self.tick >= self.noise_override[1]:
            return self.noise_override[0]
        return self.sense_noise_prob

    def room_at(self, cell: Cell) -> Room | None:
        """Room whose floor rectangle contains the cell (doors are outside it)."""
        return self._room_index.get(cell)

    def rooms_with_door(self, cell: Cell) -> list[Room]:
        return self._door_index.get(cell, [])

    def __post_init__(self) -> None:
        self._room_index: dict[Cell, Room] = {}
        self._door_index: dict[Cell, list[Room]] = {}
        for room in self.static_map.rooms:
            for c in room.interior_cells():
                self._room_index[c] = room
            for d in room.doors:
                self._door_index.setdefault(d, []).append(room)

    def block_counts(self) -> tuple[int, int, int]:
        """(placed, held, consumed) block counts, for the conservation check."""
        placed = sum(1 for b in self.blocks.values() if b.cell is not None)
        held = sum(1 for b in self.blocks.values() if b.held_by is not None)
        consumed = sum(1 for b in self.blocks.values() if b.consumed)
        return placed, held, consumed


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def state_to_json_obj(state: WorldState) -> dict[str, Any]:
    """Canonical, field-ordered encoding of the dynamic state.

    This is the documented serialization used for replay hashing; it must
    stay stable across versions within a major release.
    """
    return {
        "tick": state.tick,
        "cells": ["".join(row) for row in state.grid],
        "blocks": [
            {
                "id": b.block_id,
                "color": b.color,
                "cell": list(b.cell) if b.cell is not None else None,
                "held_by": b.held_by,
                "consumed": b.consumed,
            }
            for b in sorted(state.blocks.values(), key=lambda b: b.block_id)
        ],
        "bots": [
            {
                "player": bot.player_id,
                "role": bot.role_id,
                "position": list(bot.position),
                "held": list(bot.held),
                "battery": bot.battery,
                "move_cooldown": bot.move_cooldown,
            }
            for bot in sorted(state.bots.values(), key=lambda b: b.player_id)
        ],
        "sequence": {"colors": state.sequence.colors, "next_index": state.sequence.next_index},
        "correct_drops": {str(k): v for k, v in sorted(state.correct_drops.items())},
        "incorrect_drops": {str(k): v for k, v in sorted(state.incorrect_drops.items())},
        "seed": state.seed,
        "blackout_until": state.blackout_until,
        "blockage_prior": [
            [list(c), kind] for c, kind in sorted(state.blockage_prior.items())
        ],
        "drain_override": list(state.drain_override) if state.drain_override else None,
        "noise_override": list(state.noise_override) if state.noise_override else None,
    }


def state_digest(state: WorldState) -> str:
    """SHA-256 over the canonical state serialization."""
    return hashlib.sha256(canonical_json(state_to_json_obj(state)).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Action:
    """One bot action for one tick.

    Kinds: move(direction), grab(block), drop, sense, clear(cell),
    chat(to, body), noop. ``body`` is {"text": str} or {"catalog": int}.
    """

    kind: str
    direction: str | None = None
    block: int | None = None
    cell: Cell | None = None
    to: str | int | None = None
    body: dict[str, Any] | None = None

    KINDS = ("move", "grab", "drop", "sense", "clear", "chat", "noop")

    @staticmethod
    def move(direction: str) -> "Action":
        return Action(kind="move", direction=direction)

    @staticmethod
    def grab(block: int) -> "Action":
        return Action(kind="grab", block=block)

    @staticmethod
    def drop() -> "Action":
        return Action(kind="drop")

    @staticmethod
    def sense() -> "Action":
        return Action(kind="sense")

    @staticmethod
    def clear(cell: Cell) -> "Action":
        return Action(kind="clear", cell=cell)

    @staticmethod
    def chat(to: str | int, body: dict[str, Any]) -> "Action":
        return Action(kind="chat", to=to, body=body)

    @staticmethod
    def noop() -> "Action":
        return Action(kind="noop")

    def to_json_obj(self) -> dict[str, Any]:
        obj: dict[str, Any] = {"kind": self.kind}
        if self.direction is not None:
            obj["direction"] = self.direction
        if self.block is not None:
            obj["block"] = self.block
        if self.cell is not None:
            obj["cell"] = list(self.cell)
        if self.to is not None:
            obj["to"] = self.to
        if self.body is not None:
            obj["body"] = self.body
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict[str, Any]) -> "Action":
        cell = obj.get("cell")
        return cls(
            kind=obj["kind"],
            direction=obj.get("direction"),
            block=obj.get("block"),
            cell=tuple(cell) if cell is not None else None,
            to=obj.get("to"),
            body=obj.get("body"),
        )


def iter_line(a: Cell, b: Cell) -> Iterable[Cell]:
    """Cells strictly between two axis-aligned cells."""
    if a[0] == b[0]:
        lo, hi = sorted((a[1], b[1]))
        return ((a[0], y) for y in range(lo + 1, hi))
    if a[1] == b[1]:
        lo, hi = sorted((a[0], b[0]))
        return ((x, a[1]) for x in range(lo + 1, hi))
    return iter(())
