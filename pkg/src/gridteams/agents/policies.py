"""Reference agent policies.

All policies consume protocol messages only (welcome, observations, chat
deliveries, rejects); none touches engine state. random_walker drifts
uniformly over legal moves; greedy_collector fetches known needed-color
blocks and explores rooms otherwise; the coordinated pair splits the task
into a sighted scout that announces blocks over chat and a color-blind
carrier that acts only on what it has been told.

Memory separates block locations from block colors: a block leaving sight
(grabbed, or carried elsewhere) loses its believed cell but keeps its known
color, which is what lets a blind carrier trust what it is holding.
"""

from __future__ import annotations

import random
import re
from typing import Any

from .pathing import Cell, Grid, distances, next_step


class Policy:
    name = "policy"

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.role: dict[str, Any] = {}
        self.sequence: tuple[int, ...] = ()
        self.grid: Grid | None = None
        self.last_reject: str | None = None
        self.reject_streak = 0
        self.backoff_until = -1

    # -- protocol hooks -----------------------------------------------------

    def on_welcome(self, welcome) -> None:
        self.role = welcome.role
        self.sequence = tuple(welcome.sequence)

    def on_chat(self, message) -> None:
        pass

    def on_reject(self, message) -> None:
        self.last_reject = message.reason
        self.reject_streak += 1

    def on_ack(self, message) -> None:
        self.last_reject = None
        self.reject_streak = 0

    def on_session_event(self, message) -> None:
        pass

    def decide(self, obs: dict[str, Any]) -> dict[str, Any]:
        raise NotImplementedError

    # -- shared helpers -----------------------------------------------------

    def refresh_grid(self, obs: dict[str, Any]) -> None:
        if obs.get("geometry"):
            self.grid = Grid(obs["geometry"])

    def position(self, obs: dict[str, Any]) -> Cell:
        return tuple(obs["you"]["position"])

    def other_bots(self, obs: dict[str, Any]) -> dict[int, Cell]:
        me = obs["player"]
        return {b["player"]: tuple(b["position"]) for b in obs["bots"] if b["player"] != me}

    def legal_moves(self, obs: dict[str, Any]) -> list[str]:
        if self.grid is None:
            return []
        pos = self.position(obs)
        occupied = set(self.other_bots(obs).values())
        moves = []
        for name, delta in (("north", (0, -1)), ("south", (0, 1)), ("east", (1, 0)), ("west", (-1, 0))):
            cell = (pos[0] + delta[0], pos[1] + delta[1])
            if self.grid.passable(cell) and cell not in occupied:
                moves.append(name)
        return moves

    def random_move(self, obs: dict[str, Any]) -> dict[str, Any]:
        moves = self.legal_moves(obs)
        if not moves or obs["you"]["battery"] <= 0:
            return {"kind": "noop"}
        return {"kind": "move", "direction": self.rng.choice(moves)}

    def step_toward(self, obs: dict[str, Any], goals: set[Cell]) -> dict[str, Any] | None:
        """Move one cell toward the nearest goal, or None when unreachable.

        After repeated rejections (a bot blocking a corridor), sidestep
        randomly once to break the symmetry.
        """
        if self.grid is None or not goals:
            return None
        pos = self.position(obs)
        if pos in goals:
            return {"kind": "noop"}
        # Randomized backoff: after repeated rejections wander for a couple
        # of ticks so two bots insisting on the same doorway desynchronize.
        if self.reject_streak >= 2:
            self.reject_streak = 0
            self.backoff_until = obs["tick"] + self.rng.randint(2, 5)
        if obs["tick"] < self.backoff_until:
            return self.random_move(obs)
        others = self.other_bots(obs).values()
        congested = any(abs(o[0] - pos[0]) + abs(o[1] - pos[1]) <= 2 for o in others)
        if congested and self.rng.random() < 0.15:
            # jitter under congestion; breaks rotating pursuit carousels
            return self.random_move(obs)
        avoid = set(self.other_bots(obs).values())
        direction, _dist = next_step(self.grid, pos, goals, avoid)
        if direction is None:
            direction, _dist = next_step(self.grid, pos, goals)  # tolerate bots in the way
        if direction is None:
            return None
        return {"kind": "move", "direction": direction}

    def off_zone_cells(self) -> set[Cell]:
        assert self.grid is not None
        return {
            (x, y)
            for y in range(self.grid.height)
            for x in range(self.grid.width)
            if self.grid.passable((x, y))
            and self.grid.kind((x, y)) != "Z"
            and self.grid.room_at((x, y)) is None
        }


class RandomWalker(Policy):
    name = "random"

    def decide(self, obs: dict[str, Any]) -> dict[str, Any]:
        self.refresh_grid(obs)
        return self.random_move(obs)


class GreedyCollector(Policy):
    """Full-capability baseline: deliver what is needed, explore otherwise."""

    name = "greedy"

    def __init__(self, rng: random.Random):
        super().__init__(rng)
        self.block_cells: dict[int, Cell] = {}
        self.block_colors: dict[int, int] = {}
        self.visited: dict[str, int] = {}

    # -- memory -------------------------------------------------------------

    def visible_rooms(self, pos: Cell) -> list[dict]:
        assert self.grid is not None
        room = self.grid.room_at(pos)
        if room is not None:
            return [room]
        if self.role.get("can_sense_at_door"):
            return self.grid.rooms_with_door(pos)
        return []

    def update_memory(self, obs: dict[str, Any]) -> None:
        self.refresh_grid(obs)
        if self.grid is None:
            return
        pos = self.position(obs)
        seen = {e["id"]: e for e in obs["blocks"]}
        for room in self.visible_rooms(pos):
            self.visited[room["id"]] = obs["tick"]
            x, y, w, h = room["rect"]
            for bid in list(self.block_cells):
                cx, cy = self.block_cells[bid]
                if x <= cx < x + w and y <= cy < y + h and bid not in seen:
                    del self.block_cells[bid]
        for bid in [b for b, c in self.block_cells.items() if c == pos]:
            if bid not in seen:
                del self.block_cells[bid]  # stood on the cell and the block is gone
        for bid, entry in seen.items():
            self.block_cells[bid] = tuple(entry["cell"])
            if isinstance(entry["color"], int):
                self.block_colors[bid] = entry["color"]

    def held_color(self, obs: dict[str, Any], block_id: int) -> int | None:
        for entry in obs["you"]["held"]:
            if entry["id"] == block_id and isinstance(entry["color"], int):
                return entry["color"]
        return self.block_colors.get(block_id)

    def needed_color(self, obs: dict[str, Any]) -> int | None:
        idx = obs["sequence_next"]
        return self.sequence[idx] if idx < len(self.sequence) else None

    # -- behavior -----------------------------------------------------------

    def decide(self, obs: dict[str, Any]) -> dict[str, Any]:
        self.update_memory(obs)
        if self.grid is None or obs["you"]["battery"] <= 0:
            return {"kind": "noop"}
        needed = self.needed_color(obs)
        if needed is None:
            return {"kind": "noop"}
        held = [e["id"] for e in obs["you"]["held"]]
        pos = self.position(obs)
        if held:
            return self.deliver(obs, held[0], needed, pos)
        action = self.fetch(obs, needed, pos)
        if action is not None:
            return action
        move = self.step_toward(obs, self.idle_goals(obs))
        return move or self.random_move(obs)

    def deliver(self, obs: dict[str, Any], block_id: int, needed: int, pos: Cell) -> dict[str, Any]:
        assert self.grid is not None
        if self.held_color(obs, block_id) == needed:
            zone = set(self.grid.dropzone_cells())
            if pos in zone:
                self.block_cells.pop(block_id, None)  # consumed on success
                return {"kind": "drop"}
            move = self.step_toward(obs, zone)
            return move or {"kind": "noop"}
        # Holding something useless: put it down outside the drop zone and
        # remember where it landed.
        if self.grid.kind(pos) != "Z":
            self.block_cells[block_id] = pos
            return {"kind": "drop"}
        move = self.step_toward(obs, self.off_zone_cells())
        return move or {"kind": "noop"}

    def fetch(self, obs: dict[str, Any], needed: int, pos: Cell) -> dict[str, Any] | None:
        """Head for a needed-color block, spreading targets across the team."""
        assert self.grid is not None
        candidates = {
            bid: cell
            for bid, cell in sorted(self.block_cells.items())
            if self.block_colors.get(bid) == needed
        }
        if not candidates:
            return None
        if pos in candidates.values():
            bid = min(b for b, c in candidates.items() if c == pos)
            if self.reject_streak >= 2:
                self.reject_streak = 0
                self.block_cells.pop(bid, None)  # kept failing to grab it
                return {"kind": "noop"}
            return {"kind": "grab", "block": bid}
        dist = distances(self.grid, pos)
        others = list(self.other_bots(obs).values())
        reachable = [(bid, cell) for bid, cell in candidates.items() if cell in dist]
        if not reachable:
            return None

        def crowded(cell: Cell) -> bool:
            mine = dist[cell]
            return any(abs(o[0] - cell[0]) + abs(o[1] - cell[1]) < mine for o in others)

        uncontested = [(bid, cell) for bid, cell in reachable if not crowded(cell)]
        pool = uncontested or reachable
        target = min(pool, key=lambda bc: (dist[bc[1]], bc[0]))[1]
        return self.step_toward(obs, {target})

    def idle_goals(self, obs: dict[str, Any]) -> set[Cell]:
        """Interior of the stalest room, rotated by player id so a team
        spreads out instead of touring in lockstep."""
        assert self.grid is not None
        rooms = self.grid.rooms
        if not rooms:
            return set()
        me = obs["player"]
        order = sorted(
            range(len(rooms)),
            key=lambda i: (self.visited.get(rooms[i]["id"], -1), (i + me) % len(rooms)),
        )
        return set(self.grid.interior_cells(rooms[order[0]]))


ANNOUNCE_RE = re.compile(r"^B(\d+) C(\d+) X(\d+) Y(\d+)$")
GONE_RE = re.compile(r"^GONE B(\d+)$")


class PairScout(GreedyCollector):
    """Sighted non-carrier: tours rooms and announces every block it sees."""

    name = "pair_scout"

    def __init__(self, rng: random.Random):
        super().__init__(rng)
        self.announced: dict[int, tuple[Cell, int]] = {}

    def decide(self, obs: dict[str, Any]) -> dict[str, Any]:
        self.update_memory(obs)
        if self.grid is None:
            return {"kind": "noop"}
        message = self.next_announcement()
        if message is not None:
            return {"kind": "chat", "to": "all", "body": {"text": message}}
        move = self.step_toward(obs, self.scan_goals(obs))
        return move or {"kind": "noop"}

    def next_announcement(self) -> str | None:
        for bid in sorted(self.announced):
            if bid not in self.block_cells:
                del self.announced[bid]
                return f"GONE B{bid}"
        for bid, cell in sorted(self.block_cells.items()):
            color = self.block_colors.get(bid)
            if color is None:
                continue
            claim = (cell, color)
            if self.announced.get(bid) != claim:
                self.announced[bid] = claim
                return f"B{bid} C{color} X{cell[0]} Y{cell[1]}"
        return None

    def scan_goals(self, obs: dict[str, Any]) -> set[Cell]:
        """Patrol rooms stalest-first; door cells suffice for a sensing role."""
        assert self.grid is not None
        rooms = sorted(self.grid.rooms, key=lambda r: (self.visited.get(r["id"], -1), r["id"]))
        if not rooms:
            return set()
        target = rooms[0]
        if self.role.get("can_sense_at_door"):
            return {tuple(d) for d in target["doors"]}
        return set(self.grid.interior_cells(target))


class PairCarrier(GreedyCollector):
    """Color-blind carrier: fetches only blocks whose color it was told."""

    name = "pair_carrier"

    def on_chat(self, message) -> None:
        text = message.body.get("text", "")
        match = ANNOUNCE_RE.match(text)
        if match:
            bid, color, x, y = (int(g) for g in match.groups())
            self.block_cells[bid] = (x, y)
            self.block_colors[bid] = color
            return
        match = GONE_RE.match(text)
        if match:
            # Location knowledge is stale; the color stays good.
            self.block_cells.pop(int(match.group(1)), None)

    def idle_goals(self, obs: dict[str, Any]) -> set[Cell]:
        """Wait just off the drop zone where the next delivery starts."""
        assert self.grid is not None
        zone = self.grid.dropzone_cells()
        if not zone:
            return set()
        top = min(y for _x, y in zone)
        staging = {
            (x, y)
            for (x, y) in self.off_zone_cells()
            if y == top - 1
        }
        return staging or self.off_zone_cells()


POLICIES = {
    "random": RandomWalker,
    "greedy": GreedyCollector,
    "pair_scout": PairScout,
    "pair_carrier": PairCarrier,
}


def make_policy(name: str, rng: random.Random) -> Policy:
    try:
        cls = POLICIES[name]
    except KeyError:
        raise ValueError(f"unknown policy {name!r}; known: {', '.join(sorted(POLICIES))}")
    return cls(rng)


def parse_assignments(spec: str, slot_names: list[str]) -> dict[str, str]:
    """Parse ``slot=policy`` pairs; ``all=policy`` covers every slot."""
    assignments: dict[str, str] = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"bad assignment {part!r}; expected slot=policy")
        slot, policy = (s.strip() for s in part.split("=", 1))
        if policy not in POLICIES:
            raise ValueError(f"unknown policy {policy!r} in {part!r}")
        if slot == "all":
            for name in slot_names:
                assignments.setdefault(name, policy)
        elif slot in slot_names:
            assignments[slot] = policy
        else:
            raise ValueError(f"unknown slot {slot!r}; scenario slots: {', '.join(slot_names)}")
    missing = [s for s in slot_names if s not in assignments]
    if missing:
        raise ValueError(f"no policy assigned for slot(s) {', '.join(missing)}")
    return assignments
