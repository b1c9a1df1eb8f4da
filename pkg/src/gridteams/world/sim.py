"""Tick pipeline shared by live sessions and replay.

Each tick runs in three stages: scheduled perturbations for the tick are
applied, per-player observations are computed (and logged when they change),
then the collected actions are stepped through the engine. Replay drives the
identical pipeline from a recorded action log, so a replayed session
reproduces both the final state hash and the engine event stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..events import ACTION, OBSERVATION, EventRecord
from .engine import init_world, step, apply_perturbation
from .types import Action, Cell, GridMap, RoleSpec, WorldState, state_digest
from .visibility import Observation, visible_view

END_COMPLETED = "completed"
END_TIMEOUT = "timeout"


class ReplayError(Exception):
    def __init__(self, message: str, entry_index: int | None = None):
        super().__init__(message if entry_index is None else f"entry {entry_index}: {message}")
        self.entry_index = entry_index


@dataclass(frozen=True)
class WorldSetup:
    """Everything the simulation needs, already resolved to concrete values."""

    grid_map: GridMap
    blocks: tuple[tuple[int, int, Cell], ...]  # (id, color, cell)
    roles: dict[str, RoleSpec]
    bot_roles: tuple[str, ...]  # per player, in player-id order
    sequence_colors: tuple[int, ...]
    palette_size: int
    time_limit_ticks: int
    perturbations: tuple[tuple[int, dict[str, Any]], ...] = ()
    chat_mode: str = "free_text"
    chat_catalog: tuple[str, ...] = ()
    collisions: bool = True
    sense_noise_prob: float = 0.0


@dataclass
class TickStart:
    events: list[EventRecord]
    observations: dict[int, Observation]


class SimRun:
    """One deterministic run of a world, advanced tick by tick."""

    def __init__(self, setup: WorldSetup, seed: int):
        self.setup = setup
        self.seed = seed
        self.state: WorldState = init_world(
            grid_map=setup.grid_map,
            blocks=setup.blocks,
            roles=setup.roles,
            bot_roles=list(setup.bot_roles),
            sequence_colors=list(setup.sequence_colors),
            seed=seed,
            palette_size=setup.palette_size,
            chat_mode=setup.chat_mode,
            chat_catalog=list(setup.chat_catalog),
            collisions=setup.collisions,
            sense_noise_prob=setup.sense_noise_prob,
        )
        self._schedule: dict[int, list[dict[str, Any]]] = {}
        for tick, payload in setup.perturbations:
            self._schedule.setdefault(tick, []).append(payload)
        self._last_obs_key: dict[int, Any] = {}
        self.ended = False
        self.end_reason: str | None = None
        self.events: list[EventRecord] = []

    @property
    def duration(self) -> int:
        return self.state.tick

    def begin_tick(self) -> TickStart:
        """Apply this tick's perturbations and produce fresh observations."""
        if self.ended:
            raise RuntimeError("simulation already ended")
        tick = self.state.tick
        events: list[EventRecord] = []
        for payload in self._schedule.get(tick, []):
            events.extend(apply_perturbation(self.state, payload))
        observations: dict[int, Observation] = {}
        for pid in sorted(self.state.bots):
            obs = visible_view(self.state, pid)
            observations[pid] = obs
            key = (obs.blackout, tuple(tuple(sorted(e.items())) for e in obs.blocks))
            if self._last_obs_key.get(pid) != key:
                self._last_obs_key[pid] = key
                events.append(
                    EventRecord(
                        tick=tick,
                        kind=OBSERVATION,
                        payload={
                            "player": pid,
                            "blackout": obs.blackout,
                            "blocks": obs.block_entries_json(),
                        },
                    )
                )
        self.events.extend(events)
        return TickStart(events=events, observations=observations)

    def complete_tick(self, actions: dict[int, Action]) -> list[EventRecord]:
        """Step the engine with the tick's actions and check end conditions."""
        if self.ended:
            raise RuntimeError("simulation already ended")
        events = step(self.state, actions)
        self.events.extend(events)
        if self.state.sequence.complete:
            self.ended = True
            self.end_reason = END_COMPLETED
        elif self.state.tick >= self.setup.time_limit_ticks:
            self.ended = True
            self.end_reason = END_TIMEOUT
        return events

    def final_digest(self) -> str:
        return state_digest(self.state)


def extract_action_log(records: list[EventRecord]) -> list[tuple[int, int, Action]]:
    """(tick, player, action) triples for every engine-attempted action."""
    entries = []
    for rec in records:
        if rec.kind == ACTION:
            entries.append(
                (rec.tick, rec.payload["player"], Action.from_json_obj(rec.payload["action"]))
            )
    return entries


def replay(
    setup: WorldSetup,
    seed: int,
    action_log: list[tuple[int, int, Action]],
    until_tick: int | None = None,
) -> SimRun:
    """Re-simulate a session from its recorded actions.

    The log must be tick-ordered, with same-tick entries in ascending player
    id (the canonical execution order); violations raise ``ReplayError``
    naming the offending entry. Simulation runs through ``until_tick`` (the
    live session's duration) or, when omitted, through the last logged tick;
    an empty log therefore reproduces the initial state. The returned run's
    final state is hash-identical to the live run's.
    """
    known = set(range(1, len(setup.bot_roles) + 1))
    last: tuple[int, int] | None = None
    for i, (tick, pid, _action) in enumerate(action_log):
        if pid not in known:
            raise ReplayError(f"unknown player {pid}", i)
        if tick < 0:
            raise ReplayError(f"negative tick {tick}", i)
        if last is not None:
            if tick < last[0]:
                raise ReplayError(f"tick {tick} after tick {last[0]}", i)
            if tick == last[0] and pid <= last[1]:
                raise ReplayError(
                    f"player {pid} out of canonical order after player {last[1]}", i
                )
        last = (tick, pid)

    by_tick: dict[int, dict[int, Action]] = {}
    for tick, pid, action in action_log:
        by_tick.setdefault(tick, {})[pid] = action

    if until_tick is None:
        until_tick = action_log[-1][0] + 1 if action_log else 0
    run = SimRun(setup, seed)
    while not run.ended and run.state.tick < until_tick:
        run.begin_tick()
        if run.ended:
            break
        run.complete_tick(by_tick.get(run.state.tick, {}))
    return run
