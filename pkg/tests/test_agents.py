from __future__ import annotations

import random

import pytest

from gridteams.agents import (
    AgentClient,
    BatchSpec,
    HeadlessError,
    PairCarrier,
    RandomWalker,
    make_policy,
    parse_assignments,
    run_batch,
)
from gridteams.net.protocol import ChatDeliverMsg, ObservationMsg, Welcome, decode, encode
from gridteams.scenario import generate, presets
from gridteams.telemetry import read_log


def welcome_for(role_extra=None):
    role = {
        "id": "worker",
        "carry_capacity": 1,
        "color_vision": "full",
        "can_sense_at_door": False,
        "can_clear_blockage": False,
        "move_period": 1,
        "battery_capacity": 100,
        "battery_drain_per_move": 0,
    }
    role.update(role_extra or {})
    return Welcome(
        player=1,
        slot="s1",
        role=role,
        scenario_digest="d",
        session="s",
        tick_rate=10,
        time_limit_ticks=100,
        sequence=(0,),
        palette_size=2,
        chat_mode="free_text",
        chat_catalog=(),
        reconnect_token="t",
        survey_tasks=(),
    )


def obs_payload(tick=0, position=(1, 1), blocks=(), battery=100):
    return {
        "tick": tick,
        "player": 1,
        "you": {
            "position": list(position),
            "role": "worker",
            "battery": battery,
            "move_cooldown": 0,
            "held": [],
        },
        "bots": [{"player": 1, "position": list(position)}],
        "blocks": list(blocks),
        "sequence_next": 0,
        "blackout": False,
        "geometry": {
            "width": 5,
            "height": 5,
            "cells": ["#####", "#...#", "#...#", "#ZZZ#", "#####"],
            "rooms": [],
        },
    }


def test_parse_assignments_grammar():
    slots = ["s1", "s2", "s3"]
    assert parse_assignments("s1=greedy,s2=random,s3=pair_scout", slots) == {
        "s1": "greedy",
        "s2": "random",
        "s3": "pair_scout",
    }
    assert parse_assignments("all=greedy", slots) == {s: "greedy" for s in slots}
    assert parse_assignments("s1=random,all=greedy", slots)["s1"] == "random"
    with pytest.raises(ValueError):
        parse_assignments("s1=warp_drive", slots)
    with pytest.raises(ValueError):
        parse_assignments("s9=greedy", slots)
    with pytest.raises(ValueError):
        parse_assignments("s1=greedy", slots)  # s2, s3 uncovered


def test_capability_guard_replaces_forbidden_action():
    class ClearHappy(RandomWalker):
        def decide(self, obs):
            return {"kind": "clear", "cell": [1, 2]}

    client = AgentClient(ClearHappy(random.Random(0)))
    client.feed(encode(welcome_for({"can_clear_blockage": False})))
    frames = client.feed(encode(ObservationMsg(tick=0, observation=obs_payload())))
    assert client.fault_count == 1
    (msg,) = [decode(f) for f in frames]
    assert msg.action == {"kind": "noop"}


def test_random_walker_emits_legal_moves_only():
    client = AgentClient(make_policy("random", random.Random(3)))
    client.feed(encode(welcome_for()))
    for tick in range(10):
        frames = client.feed(encode(ObservationMsg(tick=tick, observation=obs_payload(tick=tick))))
        (msg,) = [decode(f) for f in frames]
        assert msg.action["kind"] in ("move", "noop")
    assert client.fault_count == 0


def test_pair_carrier_trusts_told_colors():
    carrier = PairCarrier(random.Random(1))
    carrier.on_welcome(welcome_for({"color_vision": "none"}))
    carrier.on_chat(ChatDeliverMsg(sender=2, to="all", body={"text": "B7 C0 X2 Y1"}, tick=1))
    assert carrier.block_cells[7] == (2, 1)
    assert carrier.block_colors[7] == 0
    carrier.on_chat(ChatDeliverMsg(sender=2, to="all", body={"text": "GONE B7"}, tick=2))
    assert 7 not in carrier.block_cells
    assert carrier.block_colors[7] == 0  # color knowledge survives


def test_blind_greedy_never_grabs():
    scenario = presets.reciprocal_blind_pair()
    spec = BatchSpec(
        scenario=scenario,
        assignments={"s1": "greedy", "s2": "greedy"},
        trials=1,
        base_seed=77,
        out_dir="/tmp/gridteams-test-blind",
    )
    (outcome,) = run_batch(spec)
    assert outcome.result.completion is False
    records = read_log(outcome.log_path)
    grabs = [
        r
        for r in records
        if r.kind == "action" and r.payload["action"]["kind"] == "grab"
    ]
    assert grabs == []  # colors unknown: exploration only, no grabbing


def test_greedy_completes_small_generated_scenario(tmp_path):
    scenario = generate({"rooms": "2x2", "colors": 3, "seq": 3, "density": 2, "slots": 2}, 9)
    spec = BatchSpec(
        scenario=scenario,
        assignments={"s1": "greedy", "s2": "greedy"},
        trials=2,
        base_seed=50,
        out_dir=tmp_path,
    )
    outcomes = run_batch(spec)
    assert all(o.result.completion for o in outcomes)
    assert all(o.policy_faults == 0 for o in outcomes)


def test_pair_completes_reciprocal_preset(tmp_path):
    spec = BatchSpec(
        scenario=presets.reciprocal(),
        assignments={"s1": "pair_scout", "s2": "pair_carrier"},
        trials=2,
        base_seed=7,
        out_dir=tmp_path,
    )
    outcomes = run_batch(spec)
    assert all(o.result.completion for o in outcomes)
    assert all(o.policy_faults == 0 for o in outcomes)


def test_batch_identical_seeds_byte_identical_logs(tmp_path):
    scenario = generate({"rooms": "1x2", "colors": 2, "seq": 2, "density": 1, "slots": 2}, 4)
    spec = BatchSpec(
        scenario=scenario,
        assignments={"s1": "greedy", "s2": "random"},
        trials=3,
        seeds=[12, 12, 12],
        out_dir=tmp_path,
    )
    outcomes = run_batch(spec)
    blobs = [o.log_path.read_bytes() for o in outcomes]
    assert blobs[0] == blobs[1] == blobs[2]
    assert sorted(o.log_path.name for o in outcomes) == [
        f"{scenario.name}_12_0.jsonl",
        f"{scenario.name}_12_1.jsonl",
        f"{scenario.name}_12_2.jsonl",
    ]


def test_batch_different_seeds_differ(tmp_path):
    scenario = generate({"rooms": "1x2", "colors": 2, "seq": 2, "density": 1, "slots": 2}, 4)
    spec = BatchSpec(
        scenario=scenario,
        assignments={"s1": "greedy", "s2": "random"},
        trials=2,
        seeds=[1, 2],
        out_dir=tmp_path,
    )
    a, b = run_batch(spec)
    assert a.log_path.read_bytes() != b.log_path.read_bytes()


def test_batch_rejects_human_pinned_slot(tmp_path):
    from dataclasses import replace
    from gridteams.scenario.model import Slot

    scenario = generate({"rooms": "1x2", "colors": 2, "seq": 2, "density": 1, "slots": 2}, 4)
    pinned = replace(
        scenario,
        slots=(Slot(name="s1", role="worker", fill="human"), Slot(name="s2", role="worker")),
    )
    with pytest.raises(HeadlessError):
        run_batch(
            BatchSpec(
                scenario=pinned,
                assignments={"s1": "greedy", "s2": "greedy"},
                trials=1,
                out_dir=tmp_path,
            )
        )
