"""Interdependency preset scenarios.

Four fixtures operationalizing escalating workflow patterns: pooled (every
role fully capable, work simply adds up), sequential (sighted spotters feed
blind movers in one direction), reciprocal (a scout and a carrier that must
trade information back and forth), and intensive (clearing, sensing and
carrying all split across the team).
"""

from __future__ import annotations

from ..world.types import CellKind, RoleSpec
from .model import (
    GeneratedBlocksSpec,
    GeneratedMapSpec,
    Scenario,
    ScenarioMetadata,
    SequenceSpec,
    Slot,
)

SURVEY_TASKS = (
    "Explore rooms for blocks",
    "Identify block colors",
    "Carry blocks to the drop zone",
    "Share block locations with the team",
    "Keep corridors clear",
)


def pooled() -> Scenario:
    worker = RoleSpec(
        role_id="worker",
        carry_capacity=1,
        color_vision="full",
        can_sense_at_door=True,
        can_clear_blockage=True,
    )
    return Scenario(
        name="pooled",
        map_spec=GeneratedMapSpec(room_rows=2, room_cols=2),
        palette_size=4,
        sequence=SequenceSpec(length=5),
        blocks=GeneratedBlocksSpec(blocks_per_room=2, decoy_ratio=0.25),
        roles=(worker,),
        slots=tuple(Slot(name=f"s{i + 1}", role="worker") for i in range(4)),
        time_limit_ticks=600,
        tick_rate=10,
        seed=101,
        metadata=ScenarioMetadata(
            interdependency="pooled",
            relevancy="abstract search and delivery",
            tags=("preset",),
        ),
        survey_tasks=SURVEY_TASKS,
    ).resolve()


def sequential() -> Scenario:
    spotter = RoleSpec(
        role_id="spotter",
        carry_capacity=0,
        color_vision="full",
        can_sense_at_door=True,
    )
    mover = RoleSpec(role_id="mover", carry_capacity=1, color_vision="none")
    return Scenario(
        name="sequential",
        map_spec=GeneratedMapSpec(room_rows=2, room_cols=2),
        palette_size=3,
        sequence=SequenceSpec(length=4),
        blocks=GeneratedBlocksSpec(blocks_per_room=2, decoy_ratio=0.0),
        roles=(spotter, mover),
        slots=(
            Slot(name="s1", role="spotter"),
            Slot(name="s2", role="spotter"),
            Slot(name="s3", role="mover"),
            Slot(name="s4", role="mover"),
        ),
        time_limit_ticks=900,
        tick_rate=10,
        seed=102,
        metadata=ScenarioMetadata(
            interdependency="sequential",
            relevancy="one-way information pipeline",
            tags=("preset",),
        ),
        survey_tasks=SURVEY_TASKS,
    ).resolve()


def reciprocal() -> Scenario:
    scout = RoleSpec(
        role_id="scout",
        carry_capacity=0,
        color_vision="full",
        can_sense_at_door=True,
    )
    carrier = RoleSpec(role_id="carrier", carry_capacity=1, color_vision="none")
    return Scenario(
        name="reciprocal",
        map_spec=GeneratedMapSpec(room_rows=2, room_cols=2),
        palette_size=3,
        sequence=SequenceSpec(length=3),
        blocks=GeneratedBlocksSpec(blocks_per_room=2, decoy_ratio=0.0),
        roles=(scout, carrier),
        slots=(Slot(name="s1", role="scout"), Slot(name="s2", role="carrier")),
        time_limit_ticks=900,
        tick_rate=10,
        seed=103,
        metadata=ScenarioMetadata(
            interdependency="reciprocal",
            relevancy="paired capabilities",
            tags=("preset", "witness"),
        ),
        survey_tasks=SURVEY_TASKS,
    ).resolve()


def reciprocal_blind_pair() -> Scenario:
    """Control variant of the reciprocal preset: two blind carriers, chat off.

    Keeps the same world (map, blocks, sequence, limits) so completion rates
    isolate the effect of removing the scout and the information channel.
    """
    base = reciprocal()
    carrier = RoleSpec(role_id="carrier", carry_capacity=1, color_vision="none")
    return Scenario(
        name="reciprocal-blind-pair",
        map_spec=base.map_spec,
        palette_size=base.palette_size,
        sequence=base.sequence,
        blocks=base.blocks,
        roles=(carrier,),
        slots=(Slot(name="s1", role="carrier"), Slot(name="s2", role="carrier")),
        time_limit_ticks=base.time_limit_ticks,
        tick_rate=base.tick_rate,
        chat_mode="predefined_only",
        chat_catalog=(),  # no catalog entries: chat is effectively disabled
        seed=base.seed,
        metadata=ScenarioMetadata(
            interdependency="pooled",
            relevancy="control variant",
            tags=("preset", "witness-control"),
        ),
        survey_tasks=base.survey_tasks,
    )


def intensive() -> Scenario:
    engineer = RoleSpec(
        role_id="engineer",
        carry_capacity=0,
        color_vision="none",
        can_clear_blockage=True,
    )
    scout = RoleSpec(
        role_id="scout",
        carry_capacity=0,
        color_vision="full",
        can_sense_at_door=True,
    )
    carrier = RoleSpec(role_id="carrier", carry_capacity=1, color_vision="none")
    map_spec = GeneratedMapSpec(room_rows=2, room_cols=2)
    base = Scenario(
        name="intensive",
        map_spec=map_spec,
        palette_size=3,
        sequence=SequenceSpec(length=4),
        blocks=GeneratedBlocksSpec(blocks_per_room=2, decoy_ratio=0.0),
        roles=(engineer, scout, carrier),
        slots=(
            Slot(name="s1", role="engineer"),
            Slot(name="s2", role="scout"),
            Slot(name="s3", role="carrier"),
            Slot(name="s4", role="carrier"),
        ),
        time_limit_ticks=1200,
        tick_rate=10,
        seed=104,
        metadata=ScenarioMetadata(
            interdependency="intensive",
            relevancy="split capabilities under disruption",
            tags=("preset",),
        ),
        survey_tasks=SURVEY_TASKS,
    ).resolve()
    # Rubble in front of every door at mission start, plus a mid-run collapse
    # on the corridor cells below the doors of the top room row.
    door_fronts = []
    for room in base.map_spec.rooms:
        for door in room.doors:
            door_fronts.append((door[0], door[1] + 1))
    start = {"tick": 0, "kind": "blockage", "cells": [list(c) for c in door_fronts]}
    later_cells = [list(c) for c in door_fronts[:2]]
    collapse = {"tick": 300, "kind": "blockage", "cells": later_cells}
    blackout = {"tick": 500, "kind": "blackout", "duration": 100}
    from dataclasses import replace

    scenario = replace(base, perturbations=(start, collapse, blackout))
    gm = scenario.map_spec
    for cell in door_fronts:
        assert gm.cell(cell) == CellKind.FLOOR
    return scenario


ALL_PRESETS = {
    "pooled": pooled,
    "sequential": sequential,
    "reciprocal": reciprocal,
    "intensive": intensive,
}
