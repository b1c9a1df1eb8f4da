"""Reusable experiment harnesses: determinism fuzzing and the
interdependency witness.

The fuzzer samples small scenarios, policies and seeds; each trial must
(a) replay from its own log to the sealed final-state hash and (b) rerun
byte-for-byte identically. The witness measures completion rates that
demonstrate the presets' cooperation requirements are real.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from .aar import verify_log
from .agents.batch import run_trial
from .scenario import generate
from .scenario.model import Scenario
from .scenario.presets import pooled, reciprocal, reciprocal_blind_pair


@dataclass
class FuzzTrial:
    seed: int
    scenario_name: str
    completion: bool
    replay_match: bool
    rerun_identical: bool
    policy_faults: int

    @property
    def ok(self) -> bool:
        return self.replay_match and self.rerun_identical and self.policy_faults == 0


def _fuzz_scenario(rng: random.Random, index: int) -> tuple[Scenario, dict[str, str]]:
    params = {
        "rooms": rng.choice(["1x2", "2x2"]),
        "colors": rng.choice([2, 3]),
        "seq": rng.randint(2, 3),
        "density": rng.randint(1, 2),
        "slots": rng.randint(2, 3),
        "decoy": rng.choice([0.0, 0.25]),
        "time_limit_ticks": 150,
        "name": f"fuzz{index}",
    }
    scenario = generate(params, rng.randrange(1_000_000))
    extras = {}
    if rng.random() < 0.4:
        extras["sense_noise_prob"] = rng.choice([0.05, 0.2])
    perturbations = []
    if rng.random() < 0.4:
        gm = scenario.map_spec
        room = gm.rooms[rng.randrange(len(gm.rooms))]
        door = room.doors[0]
        perturbations.append(
            {"tick": rng.randint(5, 40), "kind": "blockage", "cells": [[door[0], door[1] + 1]]}
        )
    if rng.random() < 0.3:
        perturbations.append(
            {"tick": rng.randint(10, 60), "kind": "blackout", "duration": rng.randint(5, 30)}
        )
    if extras or perturbations:
        from dataclasses import replace

        scenario = replace(scenario, perturbations=tuple(perturbations), **extras)
    assignments = {
        slot.name: rng.choice(["greedy", "greedy", "random"]) for slot in scenario.slots
    }
    return scenario, assignments


def fuzz_determinism(
    trials: int, base_seed: int, out_dir: str | Path
) -> list[FuzzTrial]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = []
    for index in range(trials):
        rng = random.Random(f"fuzz:{base_seed}:{index}")
        scenario, assignments = _fuzz_scenario(rng, index)
        seed = rng.randrange(1_000_000)
        log_a = out / f"{scenario.name}_{seed}_a.jsonl"
        log_b = out / f"{scenario.name}_{seed}_b.jsonl"
        result, faults = run_trial(scenario, assignments, seed, log_a)
        run_trial(scenario, assignments, seed, log_b)
        check = verify_log(log_a)
        results.append(
            FuzzTrial(
                seed=seed,
                scenario_name=scenario.name,
                completion=result.completion,
                replay_match=check.match,
                rerun_identical=log_a.read_bytes() == log_b.read_bytes(),
                policy_faults=faults,
            )
        )
    return results


@dataclass
class WitnessArm:
    name: str
    completions: int
    trials: int
    policy_faults: int
    mean_duration: float

    @property
    def rate(self) -> float:
        return self.completions / self.trials if self.trials else 0.0


@dataclass
class WitnessReport:
    arms: dict[str, WitnessArm] = field(default_factory=dict)


def _run_arm(
    name: str,
    scenario: Scenario,
    assignments: dict[str, str],
    seeds: list[int],
    out_dir: Path,
) -> WitnessArm:
    completions = 0
    faults = 0
    durations = []
    for seed in seeds:
        log_path = out_dir / f"{name}_{seed}.jsonl"
        result, trial_faults = run_trial(scenario, assignments, seed, log_path)
        completions += result.completion
        faults += trial_faults
        durations.append(result.duration_ticks)
    return WitnessArm(
        name=name,
        completions=completions,
        trials=len(seeds),
        policy_faults=faults,
        mean_duration=sum(durations) / len(durations) if durations else 0.0,
    )


def interdependency_witness(
    out_dir: str | Path, trials: int = 100, base_seed: int = 0
) -> WitnessReport:
    """Three arms: the coordinated pair on the reciprocal preset, chat-less
    blind carriers on its control variant, and greedy agents on the pooled
    preset."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seeds = [base_seed + t for t in range(trials)]
    report = WitnessReport()
    report.arms["reciprocal_pair"] = _run_arm(
        "reciprocal_pair",
        reciprocal(),
        {"s1": "pair_scout", "s2": "pair_carrier"},
        seeds,
        out,
    )
    report.arms["blind_pair_no_chat"] = _run_arm(
        "blind_pair_no_chat",
        reciprocal_blind_pair(),
        {"s1": "greedy", "s2": "greedy"},
        seeds,
        out,
    )
    report.arms["pooled_greedy"] = _run_arm(
        "pooled_greedy",
        pooled(),
        {f"s{i + 1}": "greedy" for i in range(4)},
        seeds,
        out,
    )
    return report
