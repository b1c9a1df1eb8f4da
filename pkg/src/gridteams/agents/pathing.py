"""Grid pathfinding over observed geometry.

BFS over known-passable cells; blockage cells are treated as impassable
until an observation shows them cleared. Direction order is fixed so paths
are deterministic.
"""

from __future__ import annotations

from collections import deque

Cell = tuple[int, int]

PASSABLE = {".", "D", "Z"}
DIRECTIONS = (("north", (0, -1)), ("south", (0, 1)), ("east", (1, 0)), ("west", (-1, 0)))


class Grid:
    def __init__(self, geometry: dict):
        self.width = geometry["width"]
        self.height = geometry["height"]
        self.cells = geometry["cells"]
        self.rooms = geometry["rooms"]

    def passable(self, cell: Cell) -> bool:
        x, y = cell
        if not (0 <= x < self.width and 0 <= y < self.height):
            return False
        return self.cells[y][x] in PASSABLE

    def kind(self, cell: Cell) -> str:
        return self.cells[cell[1]][cell[0]]

    def room_at(self, cell: Cell) -> dict | None:
        for room in self.rooms:
            x, y, w, h = room["rect"]
            if x <= cell[0] < x + w and y <= cell[1] < y + h:
                return room
        return None

    def rooms_with_door(self, cell: Cell) -> list[dict]:
        return [room for room in self.rooms if list(cell) in room["doors"]]

    def interior_cells(self, room: dict) -> list[Cell]:
        x, y, w, h = room["rect"]
        return [(cx, cy) for cy in range(y, y + h) for cx in range(x, x + w)]

    def dropzone_cells(self) -> list[Cell]:
        return [
            (x, y)
            for y in range(self.height)
            for x in range(self.width)
            if self.cells[y][x] == "Z"
        ]


def distances(grid: Grid, start: Cell) -> dict[Cell, int]:
    """BFS distance field over passable cells from ``start``."""
    dist = {start: 0}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for _name, (dx, dy) in DIRECTIONS:
            nxt = (cur[0] + dx, cur[1] + dy)
            if nxt not in dist and grid.passable(nxt):
                dist[nxt] = dist[cur] + 1
                queue.append(nxt)
    return dist


def next_step(
    grid: Grid, start: Cell, goals: set[Cell], avoid: set[Cell] = frozenset()
) -> tuple[str | None, int]:
    """(first direction, distance) of a shortest path to any goal; (None, -1)
    when unreachable. Cells in ``avoid`` are skipped except as goals."""
    if start in goals:
        return None, 0
    parent: dict[Cell, tuple[Cell, str]] = {}
    dist = {start: 0}
    queue = deque([start])
    found = None
    while queue:
        cur = queue.popleft()
        if cur in goals:
            found = cur
            break
        for name, (dx, dy) in DIRECTIONS:
            nxt = (cur[0] + dx, cur[1] + dy)
            if nxt in dist or not grid.passable(nxt):
                continue
            if nxt in avoid and nxt not in goals:
                continue
            dist[nxt] = dist[cur] + 1
            parent[nxt] = (cur, name)
            queue.append(nxt)
    if found is None:
        return None, -1
    node, direction = found, ""
    while node != start:
        node, direction = parent[node]
    return direction, dist[found]
