from __future__ import annotations

import pytest

from gridteams.scenario.model import BlockPlacement, Scenario, ScenarioMetadata, Slot
from gridteams.world.types import GridMap, RoleSpec, Room


def one_room_map() -> GridMap:
    """12x8 hand fixture: one room (A) top left, corridor, drop zone strip.

    Room A floor rect is (1,1,4,2); its door (2,3) sits in the wall ring
    below the rect and opens onto the corridor.
    """
    rows = (
        "############",
        "#....#.....#",
        "#....#.....#",
        "##D###.....#",
        "#..........#",
        "#..........#",
        "#ZZZZ......#",
        "############",
    )
    rooms = (Room(room_id="A", rect=(1, 1, 4, 2), doors=((2, 3),)),)
    spawns = ((6, 4), (7, 4), (8, 4), (9, 4))
    return GridMap(width=12, height=8, rows=rows, rooms=rooms, spawns=spawns)


def worker_role(**overrides) -> RoleSpec:
    base = dict(
        role_id="worker",
        carry_capacity=1,
        color_vision="full",
        can_sense_at_door=False,
        can_clear_blockage=True,
        move_period=1,
        battery_capacity=100,
        battery_drain_per_move=0,
    )
    base.update(overrides)
    return RoleSpec(**base)


@pytest.fixture
def grid_map() -> GridMap:
    return one_room_map()


def one_room_scenario(
    blocks=((1, 0, (1, 1)),),
    sequence=(0,),
    n_slots=2,
    role=None,
    time_limit=60,
    **overrides,
) -> Scenario:
    """Explicit scenario on the hand fixture map; slot s1 does the work."""
    role = role or worker_role()
    base = dict(
        name="one-room",
        map_spec=one_room_map(),
        palette_size=3,
        sequence=tuple(sequence),
        blocks=tuple(BlockPlacement(block_id=b, color=c, cell=cell) for b, c, cell in blocks),
        roles=(role,),
        slots=tuple(Slot(name=f"s{i + 1}", role=role.role_id) for i in range(n_slots)),
        time_limit_ticks=time_limit,
        tick_rate=10,
        seed=5,
        metadata=ScenarioMetadata(interdependency="pooled"),
        survey_tasks=("find blocks", "deliver blocks"),
    )
    base.update(overrides)
    return Scenario(**base)
