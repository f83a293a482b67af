"""ST-PAMO*: time-augmented best-first search over (agent cell, boxes, time).

Box positions are carried as a sparse delta over the instance's initial
layout (see ``BoxConfig``); most boxes never move, so states stay small and
hash quickly. The search always starts from the initial box layout.
"""

from __future__ import annotations

import heapq
import time
from itertools import count
from typing import Callable, NamedTuple, Optional, Sequence

from mpamo.model import BoxConfig, Cell, Instance, TimedPath, position_at
from mpamo.simulation import sim_and_conflict_check
from mpamo.spacetime import (DEADLINE_STRIDE, MOVES, BudgetExhausted, ConstraintTable, SearchTimeout,
                             default_horizon)

INF = float("inf")


class PamoState(NamedTuple):
    cell: Cell
    boxes: BoxConfig
    t: int


class DynamicObstacles:
    """Space-time occupancy of already planned (higher-priority) agents.

    Agents rest at their last cell forever. With ``boxes_of`` set, the box
    positions induced by those agents' pushes are blocked as well.
    """

    def __init__(self, paths: Sequence[Sequence[Cell]], instance: Optional[Instance] = None,
                 include_boxes: bool = False):
        self.paths = [tuple(p) for p in paths]
        self.end = max((len(p) - 1 for p in self.paths), default=0)
        self.at = [set() for _ in range(self.end + 1)]
        self.moves = set()
        self.last_time = {}
        for p in self.paths:
            for t in range(self.end + 1):
                c = position_at(p, t)
                self.at[t].add(c)
                if t and position_at(p, t - 1) != c:
                    self.moves.add((position_at(p, t - 1), c, t))
            for t, c in enumerate(p):
                if self.last_time.get(c, -1) < t:
                    self.last_time[c] = t
            if p:
                self.last_time[p[-1]] = INF
        self.box_at = None
        if include_boxes and instance is not None and self.paths and instance.boxes:
            self.box_at = _induced_box_cells(instance, self.paths, self.end)

    def occupied(self, c: Cell, t: int) -> bool:
        cells = self.at[t] if t <= self.end else self.at[-1]
        if c in cells:
            return True
        if self.box_at is not None:
            return c in (self.box_at[t] if t <= self.end else self.box_at[-1])
        return False

    def swaps(self, u: Cell, v: Cell, t: int) -> bool:
        """True if a planned agent traverses v -> u arriving at t."""
        return (v, u, t) in self.moves


def _induced_box_cells(instance: Instance, paths, end: int) -> list:
    # only the displaced boxes; untouched ones are already in the agent's own model
    sub = Instance(instance.map, tuple((p[0], p[-1]) for p in paths), instance.boxes)
    res = sim_and_conflict_check(sub, paths)
    if not res.clean:
        return None
    initial = instance.boxes
    out = []
    for t in range(end + 1):
        row = res.box_trajectory[min(t, len(res.box_trajectory) - 1)]
        out.append({c for k, c in enumerate(row) if c != initial[k]})
    return out


class SearchResult(NamedTuple):
    path: Optional[TimedPath]
    expansions: int


def successors(instance: Instance, state: PamoState, table: Optional[ConstraintTable] = None,
               dyn: Optional[DynamicObstacles] = None, guard: Optional[Callable[[Cell, int], bool]] = None,
               stats=None) -> list:
    """Legal successor states in E, W, S, N, wait order.

    ``guard(cell, t)`` is asked about every push; a false answer drops it.
    """
    gmap = instance.map
    width, height, static = gmap.width, gmap.height, gmap.static_obstacles
    c, boxes, t = state
    nt = t + 1
    out = []
    x, y = c
    for dx, dy in MOVES:
        n = (x + dx, y + dy)
        if not (0 <= n[0] < width and 0 <= n[1] < height) or n in static:
            continue
        if table is not None and ((n, nt) in table.vertex or (c, n, nt) in table.edge):
            continue
        if dyn is not None and (dyn.occupied(n, nt) or dyn.swaps(c, n, nt)):
            continue
        nboxes = boxes
        if n != c:
            k = boxes.box_at(n)
            if k is not None:
                pt = (n[0] + dx, n[1] + dy)
                if not (0 <= pt[0] < width and 0 <= pt[1] < height) or pt in static:
                    continue
                if boxes.box_at(pt) is not None:
                    continue
                if dyn is not None and dyn.occupied(pt, nt):
                    continue
                if guard is not None:
                    if stats is not None:
                        stats.guard_calls += 1
                    if not guard(pt, nt):
                        continue
                nboxes = boxes.moved(k, pt)
        out.append(PamoState(n, nboxes, nt))
    return out


def plan_st_pamo(instance: Instance, agent: int, constraints=(), dyn: Optional[DynamicObstacles] = None,
                 guard: Optional[Callable[[Cell, int], bool]] = None, horizon: Optional[int] = None, dist: Optional[dict] = None,
                 stats=None, deadline: Optional[float] = None, budget: Optional[int] = None) -> Optional[TimedPath]:
    """Minimum arrival-time path of ``agent`` among the initial boxes, or None.

    Goal test: at the goal, later than every vertex constraint on the goal
    and later than any planned agent's visit there. Only the agent's cells are
    returned; box motion is recovered by simulation.
    """
    gmap = instance.map
    start, goal = instance.agents[agent]
    table = constraints if isinstance(constraints, ConstraintTable) else ConstraintTable(constraints, goal)
    if dist is None:
        dist = gmap.distances_to(goal)
    if start not in dist:
        return None
    goal_min_t = table.goal_min_t
    latest = table.max_t
    if dyn is not None:
        goal_min_t = max(goal_min_t, dyn.last_time.get(goal, -1) + 1)
        if goal_min_t == INF:
            return None
        latest = max(latest, dyn.end)
    if horizon is None:
        horizon = default_horizon(gmap, latest)
    collapse = latest + 1

    root = PamoState(start, BoxConfig(tuple(instance.boxes)), 0)
    tie = count()
    root_key = (start, root.boxes, 0)
    open_ = [(dist[start], 0, next(tie), root)]
    best = {root_key: 0}
    parent = {root_key: None}
    closed = set()
    expansions = 0
    try:
        while open_:
            _, _, _, state = heapq.heappop(open_)
            c, boxes, t = state
            key = (c, boxes, t if t < collapse else collapse)
            if key in closed:
                continue
            closed.add(key)
            expansions += 1
            if deadline is not None and expansions % DEADLINE_STRIDE == 0 and time.perf_counter() > deadline:
                raise SearchTimeout
            if budget is not None and expansions > budget:
                raise BudgetExhausted
            if c == goal and t >= goal_min_t:
                cells = []
                while key is not None:
                    cells.append(key[0])
                    key = parent[key]
                cells.reverse()
                return tuple(cells)
            if t >= horizon:
                continue
            for s in successors(instance, state, table, dyn, guard, stats):
                nt = s.t
                nkey = (s.cell, s.boxes, nt if nt < collapse else collapse)
                if nkey in closed or best.get(nkey, nt + 1) <= nt:
                    continue
                best[nkey] = nt
                parent[nkey] = key
                heapq.heappush(open_, (nt + dist[s.cell], -nt, next(tie), s))
        return None
    finally:
        if stats is not None:
            stats.ll_expansions += expansions
