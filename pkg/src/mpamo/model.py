"""Grid world, instances, timed paths and the push rule.

Cells are plain ``(x, y)`` tuples: x is the column, y the row. A timed path is
a tuple of cells, one per time step starting at t=0; its cost is the number of
actions (``len(path) - 1``). After its last cell an agent stays put forever.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Tuple

Cell = Tuple[int, int]
Edge = Tuple[Cell, Cell]
TimedPath = Tuple[Cell, ...]
JointPath = Tuple[TimedPath, ...]

# E, W, S, N -- fixed order keeps tie-breaking identical across runs
DIRECTIONS: Tuple[Cell, ...] = ((1, 0), (-1, 0), (0, 1), (0, -1))


class InstanceError(ValueError):
    """An instance violates a placement invariant."""


@dataclass(frozen=True)
class GridMap:
    width: int
    height: int
    static_obstacles: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise InstanceError(f"map must be non-empty, got {self.width}x{self.height}")
        object.__setattr__(self, "static_obstacles", frozenset(self.static_obstacles))
        for c in self.static_obstacles:
            if not self.in_bounds(c):
                raise InstanceError(f"static obstacle {c} is out of bounds")

    def in_bounds(self, c: Cell) -> bool:
        return 0 <= c[0] < self.width and 0 <= c[1] < self.height

    def is_free(self, c: Cell) -> bool:
        """In bounds and not a static obstacle."""
        return 0 <= c[0] < self.width and 0 <= c[1] < self.height and c not in self.static_obstacles

    def cells(self) -> Iterator[Cell]:
        for y in range(self.height):
            for x in range(self.width):
                yield (x, y)

    def free_cells(self) -> list:
        return [c for c in self.cells() if c not in self.static_obstacles]

    def distances_to(self, goal: Cell) -> dict:
        """BFS distance from every reachable free cell to ``goal`` (boxes ignored)."""
        dist = {goal: 0}
        queue = deque([goal])
        while queue:
            c = queue.popleft()
            d = dist[c] + 1
            for n in neighbors(self, c):
                if n not in dist and n not in self.static_obstacles:
                    dist[n] = d
                    queue.append(n)
        return dist


def neighbors(gmap: GridMap, c: Cell) -> list:
    """In-bounds 4-neighbours of ``c`` in E, W, S, N order.

    Static obstacles are *not* filtered out.
    """
    if not gmap.in_bounds(c):
        raise ValueError(f"cell {c} is outside the {gmap.width}x{gmap.height} map")
    x, y = c
    out = []
    for dx, dy in DIRECTIONS:
        n = (x + dx, y + dy)
        if 0 <= n[0] < gmap.width and 0 <= n[1] < gmap.height:
            out.append(n)
    return out


def is_adjacent(a: Cell, b: Cell) -> bool:
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1


def push_target(frm: Cell, box: Cell) -> Cell:
    """Cell a box at ``box`` lands on when pushed by an agent arriving from ``frm``."""
    if not is_adjacent(frm, box):
        raise ValueError(f"push from {frm} onto {box}: cells are not adjacent")
    return (2 * box[0] - frm[0], 2 * box[1] - frm[1])


@dataclass(frozen=True)
class Instance:
    map: GridMap
    agents: Tuple[Tuple[Cell, Cell], ...]
    boxes: Tuple[Cell, ...] = ()

    def __post_init__(self):
        agents = tuple((tuple(s), tuple(g)) for s, g in self.agents)
        boxes = tuple(tuple(b) for b in self.boxes)
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "boxes", boxes)
        self._check()

    def _check(self):
        m = self.map
        for i, (s, g) in enumerate(self.agents):
            for what, c in (("start", s), ("goal", g)):
                if not m.in_bounds(c):
                    raise InstanceError(f"agent {i} {what} {c} is out of bounds")
                if c in m.static_obstacles:
                    raise InstanceError(f"agent {i} {what} {c} is on a static obstacle")
        for k, b in enumerate(self.boxes):
            if not m.in_bounds(b):
                raise InstanceError(f"box {k} at {b} is out of bounds")
            if b in m.static_obstacles:
                raise InstanceError(f"box {k} at {b} is on a static obstacle")
        _check_distinct("start", self.starts)
        _check_distinct("goal", self.goals)
        _check_distinct("box", self.boxes)
        endpoints = set(self.starts) | set(self.goals)
        for k, b in enumerate(self.boxes):
            if b in endpoints:
                raise InstanceError(f"box {k} at {b} overlaps an agent start or goal")

    @property
    def starts(self) -> Tuple[Cell, ...]:
        return tuple(s for s, _ in self.agents)

    @property
    def goals(self) -> Tuple[Cell, ...]:
        return tuple(g for _, g in self.agents)

    @property
    def n_agents(self) -> int:
        return len(self.agents)


def _check_distinct(what: str, cells: Sequence[Cell]):
    seen = {}
    for i, c in enumerate(cells):
        if c in seen:
            raise InstanceError(f"{what} {seen[c]} and {what} {i} share cell {c}")
        seen[c] = i


def path_cost(path: Sequence[Cell]) -> int:
    return len(path) - 1


def sum_of_costs(jp: Iterable[Sequence[Cell]]) -> int:
    return sum(len(p) - 1 for p in jp)


def makespan(jp: Iterable[Sequence[Cell]]) -> int:
    return max((len(p) - 1 for p in jp), default=0)


def position_at(path: Sequence[Cell], t: int) -> Cell:
    """Cell occupied at time ``t`` under stay-at-goal semantics."""
    return path[t] if t < len(path) else path[-1]


class BoxConfig:
    """Box positions stored as a sparse delta over the initial layout.

    Only boxes that have left their initial cell appear in ``delta``, a tuple
    of ``(box_id, cell)`` pairs sorted by id. Equality and hashing use the
    delta only, so configurations must share the same ``initial`` tuple.
    """

    __slots__ = ("initial", "delta", "_by_cell", "_index")

    def __init__(self, initial: Tuple[Cell, ...], delta: Tuple = (), _index: dict = None):
        self.initial = initial
        self.delta = delta
        self._index = _index if _index is not None else {c: k for k, c in enumerate(initial)}
        self._by_cell = None

    @classmethod
    def from_positions(cls, initial: Tuple[Cell, ...], positions: Sequence[Cell]) -> "BoxConfig":
        delta = tuple((k, c) for k, c in enumerate(positions) if c != initial[k])
        return cls(initial, delta)

    def _moved(self) -> dict:
        if self._by_cell is None:
            self._by_cell = {c: k for k, c in self.delta}
        return self._by_cell

    def box_at(self, c: Cell):
        """Id of the box resting on ``c``, or None."""
        moved = self._moved()
        k = moved.get(c)
        if k is not None:
            return k
        k = self._index.get(c)
        if k is not None:
            for j, _ in self.delta:
                if j == k:
                    return None
        return k

    def position(self, k: int) -> Cell:
        for j, c in self.delta:
            if j == k:
                return c
        return self.initial[k]

    def positions(self) -> Tuple[Cell, ...]:
        out = list(self.initial)
        for k, c in self.delta:
            out[k] = c
        return tuple(out)

    def moved(self, k: int, to: Cell) -> "BoxConfig":
        """Configuration with box ``k`` relocated to ``to`` (canonical form kept)."""
        rest = [(j, c) for j, c in self.delta if j != k]
        if to != self.initial[k]:
            rest.append((k, to))
            rest.sort()
        return BoxConfig(self.initial, tuple(rest), self._index)

    def __eq__(self, other):
        return isinstance(other, BoxConfig) and self.delta == other.delta

    def __hash__(self):
        return hash(self.delta)

    def __len__(self):
        return len(self.delta)

    def __repr__(self):
        return f"BoxConfig(delta={dict(self.delta)})"
