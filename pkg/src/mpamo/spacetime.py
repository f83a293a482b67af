"""Space-time A* for one agent under CBS constraints, blind to every box."""

from __future__ import annotations

import heapq
import time
from itertools import count
from typing import Iterable, Optional

from mpamo.conflicts import EdgeConstraint, VertexConstraint
from mpamo.model import DIRECTIONS, Cell, GridMap, TimedPath

DEFAULT_HORIZON_FACTOR = 2
# successor order: E, W, S, N, then wait
MOVES = DIRECTIONS + ((0, 0),)
# expansions between two wall-clock deadline checks
DEADLINE_STRIDE = 128


class SearchTimeout(Exception):
    """Raised from inside a search loop once the caller's deadline passed."""


class BudgetExhausted(SearchTimeout):
    """The caller's low-level expansion budget ran out (clock-independent)."""


class ConstraintTable:
    """Vertex/edge constraints of one agent, indexed for O(1) lookups."""

    __slots__ = ("vertex", "edge", "max_t", "goal_min_t")

    def __init__(self, constraints: Iterable, goal: Cell):
        self.vertex = set()
        self.edge = set()
        self.max_t = 0
        last_goal = -1
        for w in constraints:
            if isinstance(w, VertexConstraint):
                self.vertex.add((w.cell, w.t))
                if w.cell == goal:
                    last_goal = max(last_goal, w.t)
            elif isinstance(w, EdgeConstraint):
                self.edge.add((w.edge[0], w.edge[1], w.t))
            else:
                raise TypeError(f"not a constraint: {w!r}")
            self.max_t = max(self.max_t, w.t)
        # earliest arrival from which the agent can rest at its goal forever
        self.goal_min_t = last_goal + 1

    def allows(self, u: Cell, v: Cell, t: int) -> bool:
        """Whether moving u -> v arriving at time t is permitted."""
        return (v, t) not in self.vertex and (u, v, t) not in self.edge


def default_horizon(gmap: GridMap, latest: int, factor: float = DEFAULT_HORIZON_FACTOR) -> int:
    return latest + int(factor * gmap.width * gmap.height)


def plan_moh(gmap: GridMap, start: Cell, goal: Cell, constraints=(), horizon: Optional[int] = None,
             dist: Optional[dict] = None, stats=None, deadline: Optional[float] = None,
             budget: Optional[int] = None) -> Optional[TimedPath]:
    """Minimum arrival-time path for one agent, or None.

    Ties among equal f prefer larger g, then successor order E, W, S, N, wait.
    ``dist`` may carry a precomputed goal distance table. ``deadline`` is a
    ``time.perf_counter()`` value; passing it raises SearchTimeout. More than
    ``budget`` expansions raise BudgetExhausted.
    """
    table = constraints if isinstance(constraints, ConstraintTable) else ConstraintTable(constraints, goal)
    if dist is None:
        dist = gmap.distances_to(goal)
    if start not in dist:
        return None
    if horizon is None:
        horizon = default_horizon(gmap, table.max_t)
    # beyond the last constraint the time coordinate no longer matters
    collapse = table.max_t + 1
    width, height, static = gmap.width, gmap.height, gmap.static_obstacles
    vertex, edge = table.vertex, table.edge
    goal_min_t = table.goal_min_t

    tie = count()
    start_key = (start, 0)
    open_ = [(dist[start], 0, next(tie), start, 0)]
    best = {start_key: 0}
    parent = {start_key: None}
    closed = set()
    expansions = 0
    while open_:
        _, _, _, c, t = heapq.heappop(open_)
        key = (c, t if t < collapse else collapse)
        if key in closed:
            continue
        closed.add(key)
        expansions += 1
        if deadline is not None and expansions % DEADLINE_STRIDE == 0 and time.perf_counter() > deadline:
            if stats is not None:
                stats.ll_expansions += expansions
            raise SearchTimeout
        if budget is not None and expansions > budget:
            if stats is not None:
                stats.ll_expansions += expansions
            raise BudgetExhausted
        if c == goal and t >= goal_min_t:
            if stats is not None:
                stats.ll_expansions += expansions
            return _unwind(parent, key, t)
        if t >= horizon:
            continue
        nt = t + 1
        nkey_t = nt if nt < collapse else collapse
        x, y = c
        for dx, dy in MOVES:
            n = (x + dx, y + dy)
            if not (0 <= n[0] < width and 0 <= n[1] < height) or n in static:
                continue
            if (n, nt) in vertex or (c, n, nt) in edge:
                continue
            nkey = (n, nkey_t)
            if nkey in closed or best.get(nkey, nt + 1) <= nt:
                continue
            best[nkey] = nt
            parent[nkey] = key
            heapq.heappush(open_, (nt + dist[n], -nt, next(tie), n, nt))
    if stats is not None:
        stats.ll_expansions += expansions
    return None


def _unwind(parent: dict, key, t: int) -> TimedPath:
    cells = []
    while key is not None:
        cells.append(key[0])
        key = parent[key]
    cells.reverse()
    assert len(cells) == t + 1
    return tuple(cells)
