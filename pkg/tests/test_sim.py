from __future__ import annotations

import pytest

from gridteams.events import ACTION, OBSERVATION, PERTURBATION
from gridteams.scenario import generate
from gridteams.world.sim import ReplayError, SimRun, extract_action_log, replay
from gridteams.world.types import Action, state_digest


GEN = {"rooms": "2x2", "colors": 3, "seq": 2, "density": 1, "slots": 2}


def small_setup(**params):
    merged = dict(GEN)
    merged.update(params)
    scenario = generate(merged, seed=21)
    return scenario.to_world_setup()


def scripted_run(setup, script):
    """Run a fixed per-tick action script to completion of the script."""
    run = SimRun(setup, seed=21)
    for actions in script:
        run.begin_tick()
        if run.ended:
            break
        run.complete_tick(actions)
    return run


def test_observation_events_dedup_by_change():
    setup = small_setup()
    run = SimRun(setup, seed=21)
    first = run.begin_tick()
    obs_events = [e for e in first.events if e.kind == OBSERVATION]
    assert len(obs_events) == 2  # tick 0: one per player, both new
    run.complete_tick({})
    second = run.begin_tick()
    assert [e for e in second.events if e.kind == OBSERVATION] == []  # nothing changed


def test_scheduled_perturbation_fires_on_its_tick():
    setup = small_setup()
    cell = None
    gm = setup.grid_map
    for room in gm.rooms:
        cell = [room.doors[0][0], room.doors[0][1] + 1]
        break
    from dataclasses import replace

    setup = replace(setup, perturbations=(((3, {"kind": "blockage", "cells": [cell]})),))
    run = SimRun(setup, seed=21)
    fired = []
    for _ in range(5):
        start = run.begin_tick()
        fired.extend(e for e in start.events if e.kind == PERTURBATION)
        run.complete_tick({})
    assert len(fired) == 1 and fired[0].tick == 3


def test_timeout_duration_equals_time_limit():
    setup = small_setup()
    from dataclasses import replace

    setup = replace(setup, time_limit_ticks=6)
    run = SimRun(setup, seed=21)
    while not run.ended:
        run.begin_tick()
        if run.ended:
            break
        run.complete_tick({})
    assert run.end_reason == "timeout"
    assert run.duration == 6


def test_replay_empty_log_is_initial_state():
    setup = small_setup()
    initial = state_digest(SimRun(setup, seed=21).state)
    run = replay(setup, 21, [])
    assert run.state.tick == 0
    assert state_digest(run.state) == initial


def test_replay_reproduces_live_hash_and_event_stream():
    setup = small_setup()
    live = SimRun(setup, seed=21)
    script = [
        {1: Action.move("east"), 2: Action.move("west")},
        {1: Action.move("north")},
        {2: Action.chat("all", {"text": "hi"})},
        {1: Action.move("north"), 2: Action.move("west")},
    ]
    for actions in script:
        live.begin_tick()
        live.complete_tick(actions)
    log = extract_action_log(live.events)
    rerun = replay(setup, 21, log, until_tick=live.state.tick)
    assert state_digest(rerun.state) == state_digest(live.state)
    assert [e.to_json_obj() for e in rerun.events] == [e.to_json_obj() for e in live.events]


def test_replay_rejects_unknown_player():
    setup = small_setup()
    with pytest.raises(ReplayError) as err:
        replay(setup, 21, [(0, 9, Action.noop())])
    assert "unknown player" in str(err.value) and "entry 0" in str(err.value)


def test_replay_rejects_non_canonical_order():
    setup = small_setup()
    log = [(0, 2, Action.noop()), (0, 1, Action.noop())]
    with pytest.raises(ReplayError) as err:
        replay(setup, 21, log)
    assert "canonical order" in str(err.value)
    with pytest.raises(ReplayError):
        replay(setup, 21, [(5, 1, Action.noop()), (4, 1, Action.noop())])


def test_full_run_determinism_digest():
    setup = small_setup()

    def run_once():
        run = SimRun(setup, seed=33)
        rng_actions = [
            {1: Action.move("east")},
            {1: Action.move("east"), 2: Action.move("east")},
            {2: Action.sense()},
        ]
        for actions in rng_actions:
            run.begin_tick()
            run.complete_tick(actions)
        return run.final_digest(), [e.to_json_obj() for e in run.events]

    assert run_once() == run_once()
