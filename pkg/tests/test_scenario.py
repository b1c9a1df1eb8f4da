from __future__ import annotations

import json

import pytest

from gridteams.scenario import (
    GenerationError,
    Scenario,
    ScenarioParseError,
    difficulty_summary,
    dumps,
    generate,
    load,
    loads,
    presets,
    save,
    validate,
)
from gridteams.scenario.generate import generate_map, round_half_up
from gridteams.scenario.model import (
    GeneratedBlocksSpec,
    GeneratedMapSpec,
    ScenarioMetadata,
    SequenceSpec,
    Slot,
)
from gridteams.scenario.solver import solve
from gridteams.world.types import CellKind, RoleSpec


GEN_PARAMS = {"rooms": "2x2", "colors": 3, "seq": 3, "density": 2, "decoy": 0.0}


def sample_scenario(**overrides) -> Scenario:
    params = dict(GEN_PARAMS)
    params.update(overrides.pop("params", {}))
    seed = overrides.pop("seed", 42)
    scenario = generate(params, seed)
    if overrides:
        from dataclasses import replace

        scenario = replace(scenario, **overrides)
    return scenario


def test_generated_map_shape_and_rooms():
    gm = generate_map(GeneratedMapSpec(room_rows=2, room_cols=2))
    assert gm.width == 16 and gm.height == 18
    assert len(gm.rooms) == 4
    for room in gm.rooms:
        assert len(room.doors) == 1
        x, y, w, h = room.rect
        for cell in room.interior_cells():
            assert gm.cell(cell) == CellKind.FLOOR
        door = room.doors[0]
        assert gm.cell(door) == CellKind.DOOR
        below = (door[0], door[1] + 1)
        assert gm.cell(below) == CellKind.FLOOR
    zone = gm.cells_of_kind(CellKind.DROP_ZONE)
    assert zone and len(gm.spawns) >= 12


def test_generate_is_deterministic():
    a = generate(dict(GEN_PARAMS), 42)
    b = generate(dict(GEN_PARAMS), 42)
    assert a == b
    assert dumps(a) == dumps(b)
    c = generate(dict(GEN_PARAMS), 43)
    assert c != a


def test_decoy_ratio_zero_means_all_colors_in_sequence():
    scenario = generate(dict(GEN_PARAMS), 7)
    seq_colors = set(scenario.sequence)
    assert all(b.color in seq_colors for b in scenario.blocks)


def test_decoy_count_is_rounded_share():
    params = dict(GEN_PARAMS, rooms="3x3", colors=4, seq=6, decoy=0.25)
    scenario = generate(params, 42)
    total = len(scenario.blocks)  # 9 rooms x 2
    assert total == 18
    seq_colors = set(scenario.sequence)
    decoys = sum(1 for b in scenario.blocks if b.color not in seq_colors)
    assert decoys == round_half_up(0.25 * 18) == 5


def test_acceptance_fixture_params_validate_ok():
    # 3x3 rooms, 4 colors, sequence 6, density 2, decoy 0.25, seed 42
    scenario = generate(dict(GEN_PARAMS, rooms="3x3", colors=4, seq=6, decoy=0.25), 42)
    report = validate(scenario)
    assert report.ok, report.render()


def test_generate_infeasible_sequence_longer_than_capacity():
    with pytest.raises(GenerationError):
        generate(dict(GEN_PARAMS, rooms="1x1", seq=5, density=2), 1)


def test_validate_insufficient_blocks():
    scenario = sample_scenario()
    from dataclasses import replace

    short = replace(
        scenario,
        sequence=(0, 0),
        blocks=tuple(b for b in scenario.blocks if b.color != 0)
        + tuple(b for b in scenario.blocks if b.color == 0)[:1],
    )
    report = validate(short)
    assert not report.ok
    assert any(code == "InsufficientBlocks" for code, _, _ in report.errors)


def test_validate_room_sealed():
    scenario = sample_scenario()
    gm = scenario.map_spec
    from dataclasses import replace as dreplace

    sealed_rooms = tuple(
        type(r)(room_id=r.room_id, rect=r.rect, doors=()) if i == 0 else r
        for i, r in enumerate(gm.rooms)
    )
    rows = [list(row) for row in gm.rows]
    d = gm.rooms[0].doors[0]
    rows[d[1]][d[0]] = CellKind.WALL
    sealed = dreplace(
        scenario,
        map_spec=type(gm)(
            width=gm.width,
            height=gm.height,
            rows=tuple("".join(r) for r in rows),
            rooms=sealed_rooms,
            spawns=gm.spawns,
        ),
    )
    report = validate(sealed)
    assert any(code == "RoomSealed" for code, _, _ in report.errors)


def test_validate_room_unreachable_behind_walls():
    scenario = sample_scenario()
    gm = scenario.map_spec
    from dataclasses import replace as dreplace

    rows = [list(row) for row in gm.rows]
    door = gm.rooms[0].doors[0]
    front = (door[0], door[1] + 1)
    for cell in ((front[0] - 1, front[1]), (front[0] + 1, front[1]), (front[0], front[1] + 1)):
        rows[cell[1]][cell[0]] = CellKind.WALL
    walled = dreplace(
        scenario,
        map_spec=type(gm)(
            width=gm.width,
            height=gm.height,
            rows=tuple("".join(r) for r in rows),
            rooms=gm.rooms,
            spawns=gm.spawns,
        ),
        blocks=tuple(b for b in scenario.blocks if not gm.rooms[0].contains(b.cell)),
        sequence=(),
    )
    report = validate(walled)
    assert any(code == "RoomUnreachable" for code, _, _ in report.errors)


def test_validate_well_formed_sample_no_warnings():
    scenario = generate(dict(GEN_PARAMS, rooms="2x2", colors=3, seq=4, density=2), 5)
    report = validate(scenario)
    assert report.ok and not report.warnings, report.render()


def test_validate_slot_bounds():
    scenario = sample_scenario()
    too_many = scenario.with_slots(
        tuple(Slot(name=f"s{i}", role="worker") for i in range(13))
    )
    report = validate(too_many)
    assert any(code == "SlotCount" for code, _, _ in report.errors)
    solo = scenario.with_slots((Slot(name="s1", role="worker"),))
    assert any(code == "SlotCount" for code, _, _ in validate(solo).errors)


def test_validate_warns_blind_carriers_without_chat():
    blind = RoleSpec(role_id="blind_carrier", carry_capacity=1, color_vision="none")
    from dataclasses import replace

    scenario = replace(
        sample_scenario(),
        roles=(blind,),
        slots=(Slot(name="s1", role="blind_carrier"), Slot(name="s2", role="blind_carrier")),
        chat_mode="predefined_only",
        chat_catalog=(),
    )
    report = validate(scenario)
    assert report.ok
    assert any(code in ("BlindCarriersNoChat", "AllBlind") for code, _, _ in report.warnings)


def test_round_trip_identity(tmp_path):
    scenario = sample_scenario()
    path = tmp_path / "fixture.json"
    save(scenario, path)
    assert load(path) == scenario


def test_unknown_key_rejected_in_strict_mode(tmp_path):
    scenario = sample_scenario()
    obj = scenario.to_json_obj()
    obj["frobnicate"] = 1
    with pytest.raises(ScenarioParseError) as err:
        loads(json.dumps(obj))
    assert "frobnicate" in str(err.value)
    # lenient mode accepts it
    from gridteams.scenario.io import parse_scenario

    parsed, warnings = parse_scenario(obj, strict=False)
    assert parsed == scenario
    assert warnings and "frobnicate" in warnings[0]


def test_slot_count_13_fails_validation_from_file(tmp_path):
    scenario = sample_scenario()
    obj = scenario.to_json_obj()
    obj["slots"] = [{"name": f"s{i}", "role": "worker", "fill": "open"} for i in range(13)]
    parsed = loads(json.dumps(obj))
    report = validate(parsed)
    assert any(code == "SlotCount" for code, _, _ in report.errors)


def test_difficulty_summary_knobs():
    scenario = sample_scenario(params={"decoy": 0.25, "colors": 4, "seq": 4})
    knobs = difficulty_summary(scenario)
    assert set(knobs) == {
        "time_pressure",
        "palette_size",
        "info_density",
        "signal_to_noise",
        "sense_noise_prob",
        "perturbation_count",
        "interdependency_design",
    }
    assert knobs["perturbation_count"] == 0
    assert all(v is not None and v != "" for v in knobs.values())


def test_signal_to_noise_from_declared_ratio():
    scenario = Scenario(
        name="ratio",
        map_spec=GeneratedMapSpec(room_rows=2, room_cols=2),
        palette_size=4,
        sequence=SequenceSpec(length=4),
        blocks=GeneratedBlocksSpec(blocks_per_room=2, decoy_ratio=0.25),
        roles=(RoleSpec(role_id="worker"),),
        slots=(Slot(name="s1", role="worker"), Slot(name="s2", role="worker")),
        time_limit_ticks=600,
        seed=3,
    )
    assert difficulty_summary(scenario)["signal_to_noise"] == 0.75


def test_presets_validate_and_label():
    for name, build in presets.ALL_PRESETS.items():
        scenario = build()
        report = validate(scenario)
        assert report.ok, f"{name}: {report.render()}"
        assert scenario.metadata.interdependency == name


def test_omniscient_solver_completes_small_presets():
    scenario = generate(dict(GEN_PARAMS, rooms="2x2", seq=3, density=1), 11)
    ticks = solve(scenario)
    assert ticks is not None and ticks <= scenario.time_limit_ticks
