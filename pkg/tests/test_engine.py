from __future__ import annotations

import pytest

from gridteams.events import ACTION, BATTERY_EMPTY, PERTURBATION, ROOM_ENTERED, SCORE
from gridteams.world.engine import (
    DropOutcome,
    EngineError,
    PerturbationError,
    apply_perturbation,
    init_world,
    score_drop,
    step,
)
from gridteams.world.types import Action, state_digest

from conftest import one_room_map, worker_role


def make_state(n_bots=2, blocks=(), sequence=(0, 1), role=None, **kw):
    role = role or worker_role()
    return init_world(
        grid_map=one_room_map(),
        blocks=list(blocks),
        roles={role.role_id: role},
        bot_roles=[role.role_id] * n_bots,
        sequence_colors=list(sequence),
        seed=7,
        palette_size=3,
        **kw,
    )


def action_events(events):
    return [e for e in events if e.kind == ACTION]


def test_move_into_wall_rejected_position_unchanged():
    state = make_state(n_bots=1)
    state.bots[1].position = (2, 2)  # inside room A; (3, 2) is floor, (2, 1) floor
    state.bots[1].position = (4, 4)  # corridor; north of (4, 3) is wall
    events = step(state, {1: Action.move("north")})
    (ev,) = action_events(events)
    assert ev.payload["ok"] is False
    assert ev.payload["reason"] == "impassable"
    assert state.bots[1].position == (4, 4)
    assert state.tick == 1


def test_same_tick_conflict_lower_player_id_wins():
    # Hand trace of the ascending-player-id rule: both bots request (7, 5).
    state = make_state(n_bots=2)
    state.bots[1].position = (7, 4)
    state.bots[2].position = (7, 6)
    events = step(state, {1: Action.move("south"), 2: Action.move("north")})
    first, second = action_events(events)
    assert first.payload["player"] == 1 and first.payload["ok"] is True
    assert second.payload["player"] == 2 and second.payload["ok"] is False
    assert second.payload["reason"] == "occupied"
    assert state.bots[1].position == (7, 5)
    assert state.bots[2].position == (7, 6)


def test_collisions_off_allows_sharing_a_cell():
    state = make_state(n_bots=2, collisions=False)
    state.bots[1].position = (7, 4)
    state.bots[2].position = (7, 6)
    step(state, {1: Action.move("south"), 2: Action.move("north")})
    assert state.bots[1].position == state.bots[2].position == (7, 5)


def test_battery_drain_and_empty_rejection():
    role = worker_role(battery_capacity=1, battery_drain_per_move=1)
    state = make_state(n_bots=1, role=role)
    events = step(state, {1: Action.move("east")})
    assert state.bots[1].battery == 0
    assert [e.kind for e in events] == [ACTION, BATTERY_EMPTY]
    events = step(state, {1: Action.move("east")})
    (ev,) = action_events(events)
    assert ev.payload["ok"] is False and ev.payload["reason"] == "battery_empty"


def test_battery_empty_still_allows_chat_and_sense():
    role = worker_role(battery_capacity=1, battery_drain_per_move=1)
    state = make_state(n_bots=2, role=role)
    step(state, {1: Action.move("west")})
    assert state.bots[1].battery == 0
    events = step(state, {1: Action.chat("all", {"text": "stuck"})})
    assert action_events(events)[0].payload["ok"] is True
    events = step(state, {1: Action.sense()})
    assert action_events(events)[0].payload["ok"] is True


def test_move_cooldown_respects_move_period():
    role = worker_role(move_period=2)
    state = make_state(n_bots=1, role=role)
    ok = step(state, {1: Action.move("east")})
    assert action_events(ok)[0].payload["ok"] is True
    rejected = step(state, {1: Action.move("east")})
    assert action_events(rejected)[0].payload["reason"] == "cooldown"
    ok = step(state, {1: Action.move("east")})
    assert action_events(ok)[0].payload["ok"] is True
    assert state.bots[1].position == (8, 4)


def test_unknown_player_rejected_with_event():
    state = make_state(n_bots=1)
    events = step(state, {9: Action.move("east")})
    (ev,) = action_events(events)
    assert ev.payload["ok"] is False and ev.payload["reason"] == "unknown_player"


def test_clear_requires_capability():
    role = worker_role(can_clear_blockage=False)
    state = make_state(n_bots=1, role=role)
    apply_perturbation(state, {"kind": "blockage", "cells": [[6, 5]]})
    events = step(state, {1: Action.clear((6, 5))})
    (ev,) = action_events(events)
    assert ev.payload["reason"] == "capability"
    assert state.cell((6, 5)) == "X"


def test_clear_restores_prior_cell_kind():
    state = make_state(n_bots=1)
    state.bots[1].position = (2, 4)
    apply_perturbation(state, {"kind": "blockage", "cells": [[2, 3]]})
    assert state.cell((2, 3)) == "X"
    events = step(state, {1: Action.clear((2, 3))})
    assert action_events(events)[0].payload["ok"] is True
    assert state.cell((2, 3)) == "D"  # door restored, not floor


def test_grab_and_drop_correct_advances_sequence():
    state = make_state(n_bots=1, blocks=[(1, 0, (1, 1))], sequence=(0, 1))
    state.bots[1].position = (1, 1)
    events = step(state, {1: Action.grab(1)})
    assert action_events(events)[0].payload["ok"] is True
    assert state.blocks[1].held_by == 1
    state.bots[1].position = (2, 6)  # drop zone
    events = step(state, {1: Action.drop()})
    score = [e for e in events if e.kind == SCORE][0]
    assert score.payload["outcome"] == DropOutcome.CORRECT
    assert score.payload["next_index"] == 1
    assert state.sequence.next_index == 1
    assert state.blocks[1].consumed is True
    assert state.correct_drops[1] == 1


def test_drop_wrong_color_consumes_block_and_counts_incorrect():
    # Sequence [R, G], dropping G first: incorrect, block consumed, index unchanged.
    state = make_state(n_bots=1, blocks=[(1, 1, (1, 1))], sequence=(0, 1))
    state.bots[1].position = (2, 6)
    state.blocks[1].cell = None
    state.blocks[1].held_by = 1
    state.bots[1].held.append(1)
    outcome = score_drop(state, 1, 1)
    assert outcome == DropOutcome.INCORRECT
    assert state.sequence.next_index == 0
    assert state.incorrect_drops[1] == 1
    assert state.blocks[1].consumed is True


def test_drop_outside_zone_is_non_scoring_and_grabbable():
    state = make_state(n_bots=1, blocks=[(1, 0, (1, 1))], sequence=(0,))
    state.bots[1].position = (6, 4)
    state.blocks[1].cell = None
    state.blocks[1].held_by = 1
    state.bots[1].held.append(1)
    outcome = score_drop(state, 1, 1)
    assert outcome == DropOutcome.NON_SCORING
    assert state.blocks[1].cell == (6, 4)
    assert state.sequence.next_index == 0
    assert state.incorrect_drops[1] == 0
    # still grabbable
    events = step(state, {1: Action.grab(1)})
    assert [e for e in events if e.kind == ACTION][0].payload["ok"] is True


def test_score_drop_requires_holding():
    state = make_state(n_bots=1, blocks=[(1, 0, (1, 1))])
    before = state_digest(state)
    with pytest.raises(EngineError):
        score_drop(state, 1, 1)
    assert state_digest(state) == before


def test_room_entered_event_on_interior_entry():
    state = make_state(n_bots=1)
    state.bots[1].position = (2, 3)  # on the door
    events = step(state, {1: Action.move("north")})
    entered = [e for e in events if e.kind == ROOM_ENTERED]
    assert entered and entered[0].payload == {"player": 1, "room": "A"}
    # moving within the room does not re-emit
    events = step(state, {1: Action.move("east")})
    assert not [e for e in events if e.kind == ROOM_ENTERED]


def test_blockage_spawn_skips_occupied_cells():
    state = make_state(n_bots=1)
    state.bots[1].position = (6, 4)
    (ev,) = apply_perturbation(state, {"kind": "blockage", "cells": [[6, 4], [6, 5]]})
    assert ev.kind == PERTURBATION
    assert ev.payload["applied"] == [[6, 5]]
    assert ev.payload["skipped"] == [[6, 4]]
    assert state.cell((6, 5)) == "X" and state.cell((6, 4)) == "."


def test_blockage_out_of_bounds_applies_nothing():
    state = make_state(n_bots=1)
    before = state_digest(state)
    with pytest.raises(PerturbationError):
        apply_perturbation(state, {"kind": "blockage", "cells": [[6, 5], [99, 99]]})
    assert state_digest(state) == before


def test_blockage_blocks_movement_until_cleared():
    state = make_state(n_bots=1)
    state.bots[1].position = (6, 4)
    apply_perturbation(state, {"kind": "blockage", "cells": [[7, 4]]})
    events = step(state, {1: Action.move("east")})
    assert action_events(events)[0].payload["reason"] == "impassable"
    step(state, {1: Action.clear((7, 4))})
    events = step(state, {1: Action.move("east")})
    assert action_events(events)[0].payload["ok"] is True


def test_blackout_window_arithmetic():
    state = make_state(n_bots=1)
    state.tick = 500
    apply_perturbation(state, {"kind": "blackout", "duration": 100})
    assert state.blackout_active
    state.tick = 599
    assert state.blackout_active
    state.tick = 600
    assert not state.blackout_active


def test_chat_catalog_only_mode():
    state = make_state(n_bots=2, chat_mode="predefined_only", chat_catalog=["need red"])
    events = step(state, {1: Action.chat("all", {"text": "free text"})})
    assert action_events(events)[0].payload["reason"] == "catalog_only"
    events = step(state, {1: Action.chat("all", {"catalog": 0})})
    assert action_events(events)[0].payload["ok"] is True
    events = step(state, {1: Action.chat("all", {"catalog": 5})})
    assert action_events(events)[0].payload["reason"] == "bad_catalog_index"


def test_chat_recipient_and_length_validation():
    state = make_state(n_bots=2)
    events = step(state, {1: Action.chat(9, {"text": "hi"})})
    assert action_events(events)[0].payload["reason"] == "bad_recipient"
    events = step(state, {1: Action.chat(2, {"text": "x" * 2000})})
    assert action_events(events)[0].payload["reason"] == "too_long"


def test_conservation_invariant_across_mixed_actions():
    state = make_state(
        n_bots=2, blocks=[(1, 0, (1, 1)), (2, 1, (4, 2)), (3, 0, (8, 5))], sequence=(0, 1)
    )
    assert sum(state.block_counts()) == 3
    state.bots[1].position = (8, 5)
    step(state, {1: Action.grab(3), 2: Action.move("east")})
    assert sum(state.block_counts()) == 3
    state.bots[1].position = (2, 6)
    step(state, {1: Action.drop()})
    assert sum(state.block_counts()) == 3
    placed, held, consumed = state.block_counts()
    assert (placed, held, consumed) == (2, 0, 1)


def test_determinism_same_actions_same_digest():
    def run():
        state = make_state(n_bots=2, blocks=[(1, 0, (1, 1))], sequence=(0,))
        digests = []
        for script in [
            {1: Action.move("east"), 2: Action.move("west")},
            {1: Action.move("north")},
            {2: Action.chat("all", {"text": "hello"})},
        ]:
            step(state, script)
            digests.append(state_digest(state))
        return digests

    assert run() == run()
