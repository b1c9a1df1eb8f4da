"""Declarative scenario model.

A scenario is the authoring surface: either fully explicit (concrete map,
placements, sequence) or parameterized (generator specs resolved
deterministically from the scenario seed). ``resolve`` expands every
parameterized part so the engine, validator and difficulty report all work
on concrete values.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Any

from ..world.sim import WorldSetup
from ..world.types import Cell, GridMap, RoleSpec, canonical_json

CHAT_MODES = ("free_text", "predefined_only")
SLOT_FILLS = ("human", "agent", "open")
INTERDEPENDENCY_LEVELS = ("pooled", "sequential", "reciprocal", "intensive")


class GenerationError(Exception):
    pass


@dataclass(frozen=True)
class GeneratedMapSpec:
    room_rows: int
    room_cols: int
    room_width: int = 4
    room_height: int = 3
    corridor: int = 2
    dropzone_height: int = 2

    def to_json_obj(self) -> dict[str, Any]:
        return {
            "kind": "rooms",
            "room_rows": self.room_rows,
            "room_cols": self.room_cols,
            "room_width": self.room_width,
            "room_height": self.room_height,
            "corridor": self.corridor,
            "dropzone_height": self.dropzone_height,
        }


@dataclass(frozen=True)
class SequenceSpec:
    length: int

    def to_json_obj(self) -> dict[str, Any]:
        return {"length": self.length}


@dataclass(frozen=True)
class BlockPlacement:
    block_id: int
    color: int
    cell: Cell

    def to_json_obj(self) -> dict[str, Any]:
        return {"id": self.block_id, "color": self.color, "cell": list(self.cell)}


@dataclass(frozen=True)
class GeneratedBlocksSpec:
    blocks_per_room: int
    decoy_ratio: float = 0.0

    def to_json_obj(self) -> dict[str, Any]:
        return {"blocks_per_room": self.blocks_per_room, "decoy_ratio": self.decoy_ratio}


@dataclass(frozen=True)
class Slot:
    name: str
    role: str
    fill: str = "open"  # human | agent | open

    def to_json_obj(self) -> dict[str, Any]:
        return {"name": self.name, "role": self.role, "fill": self.fill}


@dataclass(frozen=True)
class ScenarioMetadata:
    interdependency: str = "pooled"
    relevancy: str = ""
    tags: tuple[str, ...] = ()

    def to_json_obj(self) -> dict[str, Any]:
        return {
            "interdependency": self.interdependency,
            "relevancy": self.relevancy,
            "tags": list(self.tags),
        }


@dataclass(frozen=True)
class Scenario:
    name: str
    map_spec: GridMap | GeneratedMapSpec
    palette_size: int
    sequence: tuple[int, ...] | SequenceSpec
    blocks: tuple[BlockPlacement, ...] | GeneratedBlocksSpec
    roles: tuple[RoleSpec, ...]
    slots: tuple[Slot, ...]
    time_limit_ticks: int
    tick_rate: int = 10
    chat_mode: str = "free_text"
    chat_catalog: tuple[str, ...] = ()
    sense_noise_prob: float = 0.0
    perturbations: tuple[dict[str, Any], ...] = ()  # each carries a "tick" key
    seed: int = 0
    collisions: bool = True
    metadata: ScenarioMetadata = field(default_factory=ScenarioMetadata)
    survey_tasks: tuple[str, ...] = ()

    # -- resolution -------------------------------------------------------

    @property
    def is_explicit(self) -> bool:
        return (
            isinstance(self.map_spec, GridMap)
            and isinstance(self.sequence, tuple)
            and isinstance(self.blocks, tuple)
        )

    def resolve(self, seed_override: int | None = None) -> "Scenario":
        """Expand generator specs into concrete values; explicit parts pass
        through unchanged. Deterministic in (scenario, seed)."""
        from .generate import resolve_scenario

        return resolve_scenario(self, seed_override)

    def role_map(self) -> dict[str, RoleSpec]:
        return {r.role_id: r for r in self.roles}

    def to_world_setup(self) -> WorldSetup:
        if not self.is_explicit:
            raise GenerationError("scenario must be resolved before simulation")
        return WorldSetup(
            grid_map=self.map_spec,
            blocks=tuple((b.block_id, b.color, b.cell) for b in self.blocks),
            roles=self.role_map(),
            bot_roles=tuple(s.role for s in self.slots),
            sequence_colors=tuple(self.sequence),
            palette_size=self.palette_size,
            time_limit_ticks=self.time_limit_ticks,
            perturbations=tuple(
                (p["tick"], {k: v for k, v in p.items() if k != "tick"})
                for p in self.perturbations
            ),
            chat_mode=self.chat_mode,
            chat_catalog=self.chat_catalog,
            collisions=self.collisions,
            sense_noise_prob=self.sense_noise_prob,
        )

    def with_slots(self, slots: tuple[Slot, ...]) -> "Scenario":
        return replace(self, slots=slots)

    # -- serialization ----------------------------------------------------

    def to_json_obj(self) -> dict[str, Any]:
        if isinstance(self.map_spec, GridMap):
            map_obj: dict[str, Any] = {"kind": "grid", **self.map_spec.to_json_obj()}
        else:
            map_obj = self.map_spec.to_json_obj()
        seq_obj: Any = (
            list(self.sequence) if isinstance(self.sequence, tuple) else self.sequence.to_json_obj()
        )
        blocks_obj: Any = (
            [b.to_json_obj() for b in self.blocks]
            if isinstance(self.blocks, tuple)
            else self.blocks.to_json_obj()
        )
        return {
            "version": 1,
            "name": self.name,
            "seed": self.seed,
            "map": map_obj,
            "palette_size": self.palette_size,
            "sequence": seq_obj,
            "blocks": blocks_obj,
            "roles": [r.to_json_obj() for r in self.roles],
            "slots": [s.to_json_obj() for s in self.slots],
            "time_limit_ticks": self.time_limit_ticks,
            "tick_rate": self.tick_rate,
            "chat_mode": self.chat_mode,
            "chat_catalog": list(self.chat_catalog),
            "sense_noise_prob": self.sense_noise_prob,
            "perturbations": list(self.perturbations),
            "collisions": self.collisions,
            "metadata": self.metadata.to_json_obj(),
            "survey_tasks": list(self.survey_tasks),
        }


def scenario_digest(scenario: Scenario) -> str:
    return hashlib.sha256(
        canonical_json(scenario.to_json_obj()).encode("utf-8")
    ).hexdigest()
