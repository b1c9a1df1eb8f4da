"""Procedural map, sequence, and block generation.

Everything here is a pure function of (params, seed): the same inputs
always produce byte-identical scenarios. Decoys are blocks whose color
appears nowhere in the target sequence, so 1 - decoy_ratio reads directly
as the scenario's signal-to-noise ratio.
"""

from __future__ import annotations

import random
from typing import Any

from ..world.types import Cell, CellKind, GridMap, RoleSpec, Room
from .model import (
    BlockPlacement,
    GeneratedBlocksSpec,
    GeneratedMapSpec,
    GenerationError,
    Scenario,
    ScenarioMetadata,
    SequenceSpec,
    Slot,
)


def round_half_up(x: float) -> int:
    return int(x + 0.5)


def generate_map(spec: GeneratedMapSpec) -> GridMap:
    """Lay out a room grid over corridors with a drop-zone strip at the bottom.

    Every room is a walled rectangle with a single door in its bottom wall,
    opening onto the corridor band below; the drop zone spans the full
    interior width so it always forms one 4-connected region.
    """
    rr, rc = spec.room_rows, spec.room_cols
    rw, rh = spec.room_width, spec.room_height
    cw = spec.corridor
    dz = spec.dropzone_height
    if min(rr, rc, rw, rh, cw, dz) < 1:
        raise GenerationError("map parameters must all be >= 1")
    block_w, block_h = rw + 2, rh + 2
    width = 2 + rc * block_w + (rc - 1) * cw
    height = 2 + rr * (block_h + cw) + dz
    grid = [[CellKind.FLOOR] * width for _ in range(height)]
    for x in range(width):
        grid[0][x] = CellKind.WALL
        grid[height - 1][x] = CellKind.WALL
    for y in range(height):
        grid[y][0] = CellKind.WALL
        grid[y][width - 1] = CellKind.WALL

    rooms: list[Room] = []
    for r in range(rr):
        by = 1 + r * (block_h + cw)
        for c in range(rc):
            bx = 1 + c * (block_w + cw)
            for yy in range(by, by + block_h):
                for xx in range(bx, bx + block_w):
                    edge = yy in (by, by + block_h - 1) or xx in (bx, bx + block_w - 1)
                    grid[yy][xx] = CellKind.WALL if edge else CellKind.FLOOR
            door = (bx + 1 + rw // 2, by + block_h - 1)
            grid[door[1]][door[0]] = CellKind.DOOR
            rooms.append(
                Room(
                    room_id=f"R{r * rc + c}",
                    rect=(bx + 1, by + 1, rw, rh),
                    doors=(door,),
                )
            )

    dz_y = height - 1 - dz
    for yy in range(dz_y, height - 1):
        for xx in range(1, width - 1):
            grid[yy][xx] = CellKind.DROP_ZONE

    spawns = tuple((x, dz_y) for x in range(1, width - 1))
    return GridMap(
        width=width,
        height=height,
        rows=tuple("".join(row) for row in grid),
        rooms=tuple(rooms),
        spawns=spawns,
    )


def generate_sequence(
    spec: SequenceSpec, palette_size: int, decoys_needed: bool, rng: random.Random
) -> tuple[int, ...]:
    """Draw a target sequence. When decoys are requested the last palette
    color is reserved for them so a decoy color always exists."""
    pool = palette_size - 1 if decoys_needed else palette_size
    if pool < 1:
        raise GenerationError("palette too small for the requested sequence")
    return tuple(rng.randrange(pool) for _ in range(spec.length))


def generate_blocks(
    grid_map: GridMap,
    sequence: tuple[int, ...],
    spec: GeneratedBlocksSpec,
    palette_size: int,
    rng: random.Random,
) -> tuple[BlockPlacement, ...]:
    rooms = grid_map.rooms
    total = spec.blocks_per_room * len(rooms)
    if total < len(sequence):
        raise GenerationError(
            f"sequence needs {len(sequence)} blocks but only {total} will be placed"
        )
    decoy_count = round_half_up(spec.decoy_ratio * total)
    if total - decoy_count < len(sequence):
        raise GenerationError("decoy_ratio leaves too few blocks to cover the sequence")
    sequence_colors = sorted(set(sequence))
    decoy_colors = [c for c in range(palette_size) if c not in set(sequence)]
    if decoy_count > 0 and not decoy_colors:
        raise GenerationError("no palette color is free for decoys")

    colors = list(sequence)
    colors += [rng.choice(sequence_colors) for _ in range(total - len(sequence) - decoy_count)]
    colors += [rng.choice(decoy_colors) for _ in range(decoy_count)]
    rng.shuffle(colors)

    cells: list[Cell] = []
    for room in rooms:
        interior = room.interior_cells()
        if spec.blocks_per_room > len(interior):
            raise GenerationError(
                f"room {room.room_id} holds at most {len(interior)} blocks"
            )
        cells.extend(sorted(rng.sample(interior, spec.blocks_per_room)))

    return tuple(
        BlockPlacement(block_id=i + 1, color=color, cell=cell)
        for i, (color, cell) in enumerate(zip(colors, cells))
    )


def resolve_scenario(scenario: Scenario, seed_override: int | None = None) -> Scenario:
    """Expand generator specs to concrete values; no-op for explicit parts."""
    from dataclasses import replace

    seed = scenario.seed if seed_override is None else seed_override
    rng = random.Random(f"gridteams:{seed}")
    grid_map = (
        scenario.map_spec
        if isinstance(scenario.map_spec, GridMap)
        else generate_map(scenario.map_spec)
    )
    if isinstance(scenario.blocks, GeneratedBlocksSpec):
        decoys_needed = scenario.blocks.decoy_ratio > 0
    else:
        decoys_needed = False
    sequence = (
        scenario.sequence
        if isinstance(scenario.sequence, tuple)
        else generate_sequence(scenario.sequence, scenario.palette_size, decoys_needed, rng)
    )
    blocks = (
        scenario.blocks
        if isinstance(scenario.blocks, tuple)
        else generate_blocks(grid_map, sequence, scenario.blocks, scenario.palette_size, rng)
    )
    return replace(
        scenario,
        map_spec=grid_map,
        sequence=sequence,
        blocks=blocks,
        seed=seed,
    )


DEFAULT_WORKER = RoleSpec(
    role_id="worker",
    carry_capacity=1,
    color_vision="full",
    can_sense_at_door=True,
    can_clear_blockage=True,
)


def generate(params: dict[str, Any], seed: int) -> Scenario:
    """Build a fully explicit scenario from generator parameters.

    ``params`` keys: rooms (RxC string or [rows, cols]), colors, seq,
    density, decoy, slots (default 4), name, time_limit_ticks, tick_rate.
    """
    rooms = params["rooms"]
    if isinstance(rooms, str):
        rows, cols = (int(v) for v in rooms.lower().split("x"))
    else:
        rows, cols = rooms
    n_slots = int(params.get("slots", 4))
    scenario = Scenario(
        name=params.get("name", f"gen-{rows}x{cols}-s{seed}"),
        map_spec=GeneratedMapSpec(room_rows=rows, room_cols=cols),
        palette_size=int(params["colors"]),
        sequence=SequenceSpec(length=int(params["seq"])),
        blocks=GeneratedBlocksSpec(
            blocks_per_room=int(params["density"]),
            decoy_ratio=float(params.get("decoy", 0.0)),
        ),
        roles=(DEFAULT_WORKER,),
        slots=tuple(Slot(name=f"s{i + 1}", role="worker") for i in range(n_slots)),
        time_limit_ticks=int(params.get("time_limit_ticks", 600)),
        tick_rate=int(params.get("tick_rate", 10)),
        seed=seed,
        metadata=ScenarioMetadata(interdependency="pooled", relevancy="abstract"),
        survey_tasks=(
            "Explore rooms for blocks",
            "Carry blocks to the drop zone",
            "Share block locations with the team",
        ),
    )
    return scenario.resolve()
