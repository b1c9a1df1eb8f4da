"""Scenario validation: structural invariants plus solvability checks.

Semantic problems are reported, never raised; the report's ``ok`` flag is
true exactly when no errors were found. Reachability treats door cells as
passable and blockage cells as passable only when some slotted role can
clear them.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field

from ..world.types import Cell, CellKind, GridMap
from .model import (
    GeneratedBlocksSpec,
    GenerationError,
    Scenario,
    CHAT_MODES,
    INTERDEPENDENCY_LEVELS,
    SLOT_FILLS,
)


@dataclass
class ValidationReport:
    errors: list[tuple[str, str, str]] = field(default_factory=list)  # (code, location, message)
    warnings: list[tuple[str, str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def error(self, code: str, location: str, message: str) -> None:
        self.errors.append((code, location, message))

    def warn(self, code: str, location: str, message: str) -> None:
        self.warnings.append((code, location, message))

    def render(self) -> str:
        lines = [f"ok: {self.ok}"]
        for code, loc, msg in self.errors:
            lines.append(f"error {code} at {loc}: {msg}")
        for code, loc, msg in self.warnings:
            lines.append(f"warning {code} at {loc}: {msg}")
        return "\n".join(lines)


def validate(scenario: Scenario) -> ValidationReport:
    report = ValidationReport()
    _check_structure(scenario, report)
    try:
        resolved = scenario.resolve()
    except GenerationError as exc:
        report.error("Infeasible", "scenario", str(exc))
        return report
    _check_map(resolved.map_spec, report)
    _check_blocks(resolved, report)
    if report.ok:
        _check_reachability(resolved, report)
    _check_completability(resolved, report)
    return report


def _check_structure(s: Scenario, report: ValidationReport) -> None:
    if not (2 <= len(s.slots) <= 12):
        report.error("SlotCount", "slots", f"2 <= slots <= 12 required, got {len(s.slots)}")
    roles = s.role_map()
    seen_names = set()
    for i, slot in enumerate(s.slots):
        if slot.role not in roles:
            report.error("UnknownRole", f"slots[{i}]", f"role {slot.role!r} is not defined")
        if slot.fill not in SLOT_FILLS:
            report.error("BadFill", f"slots[{i}]", f"fill must be one of {SLOT_FILLS}")
        if slot.name in seen_names:
            report.error("DuplicateSlotName", f"slots[{i}]", f"slot name {slot.name!r} repeats")
        seen_names.add(slot.name)
    if s.palette_size < 1:
        report.error("Palette", "palette_size", "palette_size must be >= 1")
    if s.time_limit_ticks <= 0:
        report.error("TimeLimit", "time_limit_ticks", "time_limit_ticks must be > 0")
    if s.tick_rate < 1:
        report.error("TickRate", "tick_rate", "tick_rate must be >= 1")
    if not (0.0 <= s.sense_noise_prob <= 1.0):
        report.error("Ratio", "sense_noise_prob", "sense_noise_prob must be in [0, 1]")
    if isinstance(s.blocks, GeneratedBlocksSpec) and not (0.0 <= s.blocks.decoy_ratio <= 1.0):
        report.error("Ratio", "blocks.decoy_ratio", "decoy_ratio must be in [0, 1]")
    if s.chat_mode not in CHAT_MODES:
        report.error("ChatMode", "chat_mode", f"chat_mode must be one of {CHAT_MODES}")
    if s.metadata.interdependency not in INTERDEPENDENCY_LEVELS:
        report.error(
            "Interdependency",
            "metadata.interdependency",
            f"must be one of {INTERDEPENDENCY_LEVELS}",
        )
    if isinstance(s.sequence, tuple):
        for i, color in enumerate(s.sequence):
            if not (0 <= color < s.palette_size):
                report.error(
                    "SequenceColor", f"sequence[{i}]", f"color {color} outside palette"
                )
    for i, p in enumerate(s.perturbations):
        loc = f"perturbations[{i}]"
        if "tick" not in p or not isinstance(p["tick"], int) or p["tick"] < 0:
            report.error("PerturbationTick", loc, "a non-negative integer tick is required")
        elif p["tick"] >= s.time_limit_ticks:
            report.warn("NeverFires", loc, "scheduled at or after the time limit")
        if p.get("kind") not in ("blockage", "blackout", "drain", "noise"):
            report.error("PerturbationKind", loc, f"unknown kind {p.get('kind')!r}")


def _check_map(gm: GridMap, report: ValidationReport) -> None:
    if gm.width <= 0 or gm.height <= 0:
        report.error("MapBounds", "map", "width and height must be > 0")
        return
    if len(gm.rows) != gm.height or any(len(r) != gm.width for r in gm.rows):
        report.error("MapShape", "map", "cell rows do not match the declared size")
        return
    for y, row in enumerate(gm.rows):
        for x, ch in enumerate(row):
            if ch not in CellKind.ALL:
                report.error("CellKind", f"map.cells[{y}][{x}]", f"unknown cell {ch!r}")
    for i, room in enumerate(gm.rooms):
        loc = f"map.rooms[{i}]"
        x, y, w, h = room.rect
        if w <= 0 or h <= 0 or x < 0 or y < 0 or x + w > gm.width or y + h > gm.height:
            report.error("RoomBounds", loc, f"rect {room.rect} outside the map")
            continue
        for cell in room.interior_cells():
            if gm.cell(cell) != CellKind.FLOOR:
                report.error(
                    "RoomCells", loc, f"cell {list(cell)} must be floor, found {gm.cell(cell)!r}"
                )
        if not room.doors:
            report.error("RoomSealed", loc, "room has no door cells")
        ring = _perimeter_ring(room.rect)
        for d in room.doors:
            if not gm.in_bounds(d) or gm.cell(d) != CellKind.DOOR:
                report.error("DoorPlacement", loc, f"door {list(d)} is not a door cell")
            elif d not in ring:
                report.error("DoorPlacement", loc, f"door {list(d)} not on the room perimeter")
    zone = gm.cells_of_kind(CellKind.DROP_ZONE)
    if not zone:
        report.error("NoDropZone", "map", "no drop zone cells")
    elif not _connected(set(zone)):
        report.error("DropZoneSplit", "map", "drop zone cells are not one 4-connected region")


def _perimeter_ring(rect: tuple[int, int, int, int]) -> set[Cell]:
    x, y, w, h = rect
    ring: set[Cell] = set()
    for xx in range(x - 1, x + w + 1):
        ring.add((xx, y - 1))
        ring.add((xx, y + h))
    for yy in range(y - 1, y + h + 1):
        ring.add((x - 1, yy))
        ring.add((x + w, yy))
    return ring


def _connected(cells: set[Cell]) -> bool:
    start = next(iter(cells))
    seen = {start}
    queue = deque([start])
    while queue:
        cx, cy = queue.popleft()
        for nx, ny in ((cx + 1, cy), (cx - 1, cy), (cx, cy + 1), (cx, cy - 1)):
            if (nx, ny) in cells and (nx, ny) not in seen:
                seen.add((nx, ny))
                queue.append((nx, ny))
    return len(seen) == len(cells)


def _check_blocks(s: Scenario, report: ValidationReport) -> None:
    gm = s.map_spec
    assert isinstance(gm, GridMap)
    seen_ids = set()
    for i, b in enumerate(s.blocks):
        loc = f"blocks[{i}]"
        if b.block_id in seen_ids:
            report.error("DuplicateBlockId", loc, f"block id {b.block_id} repeats")
        seen_ids.add(b.block_id)
        if not (0 <= b.color < s.palette_size):
            report.error("BlockColor", loc, f"color {b.color} outside palette")
        if not gm.in_bounds(b.cell) or gm.cell(b.cell) not in CellKind.PASSABLE:
            report.error("BlockPlacement", loc, f"cell {list(b.cell)} is not passable")
    if isinstance(s.sequence, tuple):
        placed = Counter(b.color for b in s.blocks)
        needed = Counter(s.sequence)
        for color, count in sorted(needed.items()):
            if placed[color] < count:
                report.error(
                    "InsufficientBlocks",
                    "blocks",
                    f"sequence needs {count} blocks of color {color}, only {placed[color]} placed",
                )
    if len(s.slots) > len(gm.spawns):
        report.error(
            "SpawnCount", "map.spawns", f"{len(s.slots)} slots but only {len(gm.spawns)} spawns"
        )
    for i, spawn in enumerate(gm.spawns[: len(s.slots)]):
        if not gm.in_bounds(spawn) or gm.cell(spawn) not in CellKind.PASSABLE:
            report.error("SpawnPassable", f"map.spawns[{i}]", f"spawn {list(spawn)} not passable")


def _check_reachability(s: Scenario, report: ValidationReport) -> None:
    gm = s.map_spec
    assert isinstance(gm, GridMap)
    roles = s.role_map()
    can_clear = any(roles[slot.role].can_clear_blockage for slot in s.slots)
    passable = set(CellKind.PASSABLE) | ({CellKind.BLOCKAGE} if can_clear else set())

    def reachable_from(start: Cell) -> set[Cell]:
        seen = {start}
        queue = deque([start])
        while queue:
            cx, cy = queue.popleft()
            for nxt in ((cx + 1, cy), (cx - 1, cy), (cx, cy + 1), (cx, cy - 1)):
                if nxt in seen or not gm.in_bounds(nxt):
                    continue
                if gm.cell(nxt) in passable:
                    seen.add(nxt)
                    queue.append(nxt)
        return seen

    flood_cache: dict[Cell, set[Cell]] = {}
    for si, spawn in enumerate(gm.spawns[: len(s.slots)]):
        if spawn not in flood_cache:
            flood_cache[spawn] = reachable_from(spawn)
        seen = flood_cache[spawn]
        for ri, room in enumerate(gm.rooms):
            if not all(c in seen for c in room.interior_cells()):
                report.error(
                    "RoomUnreachable",
                    f"map.rooms[{ri}]",
                    f"room {room.room_id} unreachable from spawn {si}",
                )
        for bi, block in enumerate(s.blocks):
            if block.cell not in seen:
                report.error(
                    "BlockUnreachable",
                    f"blocks[{bi}]",
                    f"block {block.block_id} unreachable from spawn {si}",
                )
        if not any(gm.cell(c) == CellKind.DROP_ZONE for c in seen):
            report.error("DropZoneUnreachable", "map", f"drop zone unreachable from spawn {si}")


def _check_completability(s: Scenario, report: ValidationReport) -> None:
    roles = s.role_map()
    slot_roles = [roles[slot.role] for slot in s.slots if slot.role in roles]
    carriers = [r for r in slot_roles if r.carry_capacity > 0]
    if not carriers:
        report.warn("NoCarrier", "slots", "no slotted role can carry blocks")
        return
    chat_usable = s.chat_mode == "free_text" or len(s.chat_catalog) > 0
    if all(r.color_vision == "none" for r in carriers):
        sighted = [r for r in slot_roles if r.color_vision == "full"]
        if not sighted:
            report.warn(
                "AllBlind", "slots", "no slotted role can see block colors"
            )
        elif not chat_usable:
            report.warn(
                "BlindCarriersNoChat",
                "slots",
                "carriers are color-blind and chat is disabled; colors cannot be relayed",
            )
