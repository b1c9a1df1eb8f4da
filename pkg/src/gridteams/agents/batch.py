"""Headless batch experiment runner.

Runs seeded trials of a scenario with scripted agents over the in-memory
lockstep transport. Trial t uses seed ``seeds[t]``; logs land in the output
directory as ``{scenario}_{seed}_{trial}.jsonl``. Results are independent of
execution order, and identical seeds give byte-identical logs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from ..net.lockstep import LockstepDriver
from ..net.session import SessionEngine, SessionResult
from ..scenario.model import Scenario
from ..telemetry.log import EventLogWriter, SimulatedClock
from .client import AgentClient
from .policies import make_policy


class HeadlessError(Exception):
    pass


@dataclass
class BatchSpec:
    scenario: Scenario
    assignments: dict[str, str]  # slot name -> policy name
    trials: int = 1
    base_seed: int = 0
    seeds: list[int] | None = None
    out_dir: str | Path = "runs"

    def seed_list(self) -> list[int]:
        if self.seeds is not None:
            if len(self.seeds) != self.trials:
                raise ValueError("seed list length must equal the trial count")
            return list(self.seeds)
        return [self.base_seed + t for t in range(self.trials)]


@dataclass
class TrialOutcome:
    trial: int
    seed: int
    result: SessionResult
    log_path: Path
    policy_faults: int = 0


def run_trial(
    scenario: Scenario, assignments: dict[str, str], seed: int, log_path: Path
) -> tuple[SessionResult, int]:
    """One seeded headless session; returns the result and total policy faults."""
    session_id = f"{scenario.name}-s{seed}"
    resolved = scenario.resolve(seed_override=seed)
    sink = EventLogWriter(log_path, session_id, SimulatedClock(resolved.tick_rate))
    engine = SessionEngine(resolved, session_id=session_id, seed=seed, sink=sink)
    clients = {
        slot: AgentClient(make_policy(policy, random.Random(f"{seed}:{slot}")))
        for slot, policy in assignments.items()
    }
    driver = LockstepDriver(engine, clients)
    result = driver.run()
    faults = sum(c.fault_count for c in clients.values())
    return result, faults


def run_batch(spec: BatchSpec) -> list[TrialOutcome]:
    if spec.trials < 1:
        raise ValueError("trials must be >= 1")
    pinned_human = [s.name for s in spec.scenario.slots if s.fill == "human"]
    if pinned_human:
        raise HeadlessError(
            f"slot(s) {', '.join(pinned_human)} are pinned to humans; batch runs are headless"
        )
    missing = [s.name for s in spec.scenario.slots if s.name not in spec.assignments]
    if missing:
        raise HeadlessError(f"no policy assigned for slot(s) {', '.join(missing)}")
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outcomes: list[TrialOutcome] = []
    for trial, seed in enumerate(spec.seed_list()):
        log_path = out_dir / f"{spec.scenario.name}_{seed}_{trial}.jsonl"
        result, faults = run_trial(spec.scenario, spec.assignments, seed, log_path)
        outcomes.append(
            TrialOutcome(trial=trial, seed=seed, result=result, log_path=log_path, policy_faults=faults)
        )
    return outcomes
