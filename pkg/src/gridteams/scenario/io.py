"""Scenario file format: versioned JSON, strict by default.

Strict mode rejects unknown keys by name; the lenient flag downgrades them
to warnings. ``load(save(s)) == s`` holds on the scenario model.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from ..world.types import GridMap, RoleSpec
from .model import (
    BlockPlacement,
    GeneratedBlocksSpec,
    GeneratedMapSpec,
    Scenario,
    ScenarioMetadata,
    SequenceSpec,
    Slot,
)

SCHEMA_VERSION = 1

TOP_KEYS = {
    "version",
    "name",
    "seed",
    "map",
    "palette_size",
    "sequence",
    "blocks",
    "roles",
    "slots",
    "time_limit_ticks",
    "tick_rate",
    "chat_mode",
    "chat_catalog",
    "sense_noise_prob",
    "perturbations",
    "collisions",
    "metadata",
    "survey_tasks",
}
REQUIRED_KEYS = {"version", "name", "map", "palette_size", "sequence", "blocks", "roles", "slots", "time_limit_ticks"}

MAP_KEYS = {
    "rooms": {"kind", "room_rows", "room_cols", "room_width", "room_height", "corridor", "dropzone_height"},
    "grid": {"kind", "width", "height", "cells", "rooms", "spawns"},
}
ROLE_KEYS = {
    "id",
    "carry_capacity",
    "color_vision",
    "can_sense_at_door",
    "can_clear_blockage",
    "move_period",
    "battery_capacity",
    "battery_drain_per_move",
}
SLOT_KEYS = {"name", "role", "fill"}
METADATA_KEYS = {"interdependency", "relevancy", "tags"}
BLOCK_KEYS = {"id", "color", "cell"}


class ScenarioParseError(Exception):
    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


def _check_keys(obj: dict, allowed: set[str], location: str, strict: bool, warnings: list[str]) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        message = f"unknown key(s) {', '.join(repr(k) for k in unknown)}"
        if strict:
            raise ScenarioParseError(message, location)
        warnings.append(f"{location}: {message}")


def parse_scenario(obj: dict[str, Any], strict: bool = True) -> tuple[Scenario, list[str]]:
    warnings: list[str] = []
    if not isinstance(obj, dict):
        raise ScenarioParseError("scenario document must be a JSON object")
    _check_keys(obj, TOP_KEYS, "scenario", strict, warnings)
    missing = sorted(REQUIRED_KEYS - set(obj))
    if missing:
        raise ScenarioParseError(f"missing required key(s) {', '.join(repr(k) for k in missing)}")
    if obj["version"] != SCHEMA_VERSION:
        raise ScenarioParseError(
            f"unsupported schema version {obj['version']!r}; this build reads version {SCHEMA_VERSION}"
        )

    map_obj = obj["map"]
    kind = map_obj.get("kind")
    if kind not in MAP_KEYS:
        raise ScenarioParseError(f"map.kind must be 'rooms' or 'grid', got {kind!r}", "map")
    _check_keys(map_obj, MAP_KEYS[kind], "map", strict, warnings)
    if kind == "rooms":
        map_spec: GridMap | GeneratedMapSpec = GeneratedMapSpec(
            room_rows=map_obj["room_rows"],
            room_cols=map_obj["room_cols"],
            room_width=map_obj.get("room_width", 4),
            room_height=map_obj.get("room_height", 3),
            corridor=map_obj.get("corridor", 2),
            dropzone_height=map_obj.get("dropzone_height", 2),
        )
    else:
        map_spec = GridMap.from_json_obj(map_obj)

    seq_obj = obj["sequence"]
    if isinstance(seq_obj, list):
        sequence: tuple[int, ...] | SequenceSpec = tuple(int(c) for c in seq_obj)
    elif isinstance(seq_obj, dict):
        _check_keys(seq_obj, {"length"}, "sequence", strict, warnings)
        sequence = SequenceSpec(length=int(seq_obj["length"]))
    else:
        raise ScenarioParseError("sequence must be a color list or {'length': N}", "sequence")

    blocks_obj = obj["blocks"]
    if isinstance(blocks_obj, list):
        placements = []
        for i, b in enumerate(blocks_obj):
            _check_keys(b, BLOCK_KEYS, f"blocks[{i}]", strict, warnings)
            placements.append(
                BlockPlacement(
                    block_id=int(b.get("id", i + 1)),
                    color=int(b["color"]),
                    cell=tuple(b["cell"]),
                )
            )
        blocks: tuple[BlockPlacement, ...] | GeneratedBlocksSpec = tuple(placements)
    elif isinstance(blocks_obj, dict):
        _check_keys(blocks_obj, {"blocks_per_room", "decoy_ratio"}, "blocks", strict, warnings)
        blocks = GeneratedBlocksSpec(
            blocks_per_room=int(blocks_obj["blocks_per_room"]),
            decoy_ratio=float(blocks_obj.get("decoy_ratio", 0.0)),
        )
    else:
        raise ScenarioParseError("blocks must be a placement list or a density spec", "blocks")

    roles = []
    for i, r in enumerate(obj["roles"]):
        _check_keys(r, ROLE_KEYS, f"roles[{i}]", strict, warnings)
        roles.append(RoleSpec.from_json_obj(r))
    slots = []
    for i, sl in enumerate(obj["slots"]):
        _check_keys(sl, SLOT_KEYS, f"slots[{i}]", strict, warnings)
        slots.append(Slot(name=sl["name"], role=sl["role"], fill=sl.get("fill", "open")))

    meta_obj = obj.get("metadata", {})
    _check_keys(meta_obj, METADATA_KEYS, "metadata", strict, warnings)
    metadata = ScenarioMetadata(
        interdependency=meta_obj.get("interdependency", "pooled"),
        relevancy=meta_obj.get("relevancy", ""),
        tags=tuple(meta_obj.get("tags", [])),
    )

    scenario = Scenario(
        name=obj["name"],
        map_spec=map_spec,
        palette_size=int(obj["palette_size"]),
        sequence=sequence,
        blocks=blocks,
        roles=tuple(roles),
        slots=tuple(slots),
        time_limit_ticks=int(obj["time_limit_ticks"]),
        tick_rate=int(obj.get("tick_rate", 10)),
        chat_mode=obj.get("chat_mode", "free_text"),
        chat_catalog=tuple(obj.get("chat_catalog", [])),
        sense_noise_prob=float(obj.get("sense_noise_prob", 0.0)),
        perturbations=tuple(obj.get("perturbations", [])),
        seed=int(obj.get("seed", 0)),
        collisions=bool(obj.get("collisions", True)),
        metadata=metadata,
        survey_tasks=tuple(obj.get("survey_tasks", [])),
    )
    return scenario, warnings


def loads(text: str, strict: bool = True) -> Scenario:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")
    scenario, _warnings = parse_scenario(obj, strict=strict)
    return scenario


def load(path: str | Path, strict: bool = True) -> Scenario:
    return loads(Path(path).read_text(encoding="utf-8"), strict=strict)


def dumps(scenario: Scenario) -> str:
    return json.dumps(scenario.to_json_obj(), indent=2, sort_keys=True) + "\n"


def save(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(dumps(scenario), encoding="utf-8")
