"""Omniscient scripted solver, used as a completability oracle in tests.

A single bot with full knowledge of the world greedily fetches the next
needed color and carries it to the drop zone, clearing rubble when its role
allows. If the solver finishes inside the time limit the scenario is
certainly completable; the converse does not hold, so tests only apply it
to small instances with generous limits.
"""

from __future__ import annotations

from collections import deque

from ..world.engine import DropOutcome
from ..world.sim import SimRun
from ..world.types import Action, Cell, CellKind, DIRECTIONS
from .model import Scenario


def _bfs_step(
    state, start: Cell, goals: set[Cell], can_clear: bool, avoid: set[Cell]
) -> tuple[str | None, Cell | None, int]:
    """First direction on a shortest path from start to any goal.

    Returns (direction, chosen goal, distance); blockage cells cost one
    extra tick when clearable. Directions are scanned in a fixed order so
    the plan is deterministic.
    """
    if start in goals:
        return None, start, 0
    dist: dict[Cell, int] = {start: 0}
    parent: dict[Cell, tuple[Cell, str]] = {}
    queue = deque([start])
    found: Cell | None = None
    while queue:
        cur = queue.popleft()
        if cur in goals:
            found = cur
            break
        for dname in ("north", "south", "east", "west"):
            dx, dy = DIRECTIONS[dname]
            nxt = (cur[0] + dx, cur[1] + dy)
            if nxt in dist or not state.in_bounds(nxt) or nxt in avoid:
                continue
            kind = state.cell(nxt)
            if kind in CellKind.PASSABLE or (can_clear and kind == CellKind.BLOCKAGE):
                dist[nxt] = dist[cur] + 1
                parent[nxt] = (cur, dname)
                queue.append(nxt)
    if found is None:
        return None, None, -1
    node = found
    direction = None
    while node != start:
        node, direction = parent[node]
    return direction, found, dist[found]


def solve(scenario: Scenario, solver_player: int | None = None) -> int | None:
    """Run the solver; returns the completion tick or None on failure."""
    resolved = scenario.resolve()
    setup = resolved.to_world_setup()
    run = SimRun(setup, seed=resolved.seed)
    state = run.state

    if solver_player is None:
        candidates = [
            pid for pid in sorted(state.bots) if state.role_of(pid).carry_capacity > 0
        ]
        if not candidates:
            return None
        solver_player = candidates[0]
    role = state.role_of(solver_player)
    others = {pid for pid in state.bots if pid != solver_player}

    while not run.ended:
        run.begin_tick()
        if run.ended:
            break
        bot = state.bots[solver_player]
        avoid = {state.bots[p].position for p in others}
        needed = state.sequence.needed_color
        action = Action.noop()
        if needed is not None:
            if bot.held:
                goals = {
                    c
                    for c in state.static_map.cells_of_kind(CellKind.DROP_ZONE)
                    if c not in avoid
                }
                if bot.position in goals or state.cell(bot.position) == CellKind.DROP_ZONE:
                    action = Action.drop()
                else:
                    direction, _goal, _d = _bfs_step(
                        state, bot.position, goals, role.can_clear_blockage, avoid
                    )
                    action = _move_or_clear(state, bot.position, direction)
            else:
                targets = {
                    b.cell: b.block_id
                    for b in state.blocks.values()
                    if b.cell is not None and b.color == needed
                }
                if not targets:
                    return None  # needed color exhausted: unsolvable from here
                if bot.position in targets:
                    action = Action.grab(targets[bot.position])
                else:
                    direction, _goal, _d = _bfs_step(
                        state, bot.position, set(targets), role.can_clear_blockage, avoid
                    )
                    if direction is None:
                        return None
                    action = _move_or_clear(state, bot.position, direction)
        run.complete_tick({solver_player: action})
        if state.sequence.complete:
            return state.tick
    return state.tick if state.sequence.complete else None


def _move_or_clear(state, position: Cell, direction: str | None) -> Action:
    if direction is None:
        return Action.noop()
    dx, dy = DIRECTIONS[direction]
    nxt = (position[0] + dx, position[1] + dy)
    if state.cell(nxt) == CellKind.BLOCKAGE:
        return Action.clear(nxt)
    return Action.move(direction)
