"""Exact joint-space solver for micro instances.

Searches states ``(agent cells, box cells, finished mask)`` with A*. An
agent standing on its goal may *finish*: from then on it rests there forever
and stops accruing cost. Every step costs the number of unfinished agents,
so an optimal plan's cost is the sum of arrival times.

Step legality is written directly from the push rules and deliberately does
not reuse the simulator, so the two can be cross-checked.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import count, product
from typing import Optional, Sequence, Tuple

from mpamo.model import DIRECTIONS, Cell, GridMap, Instance

DEFAULT_MAX_STATES = 2_000_000


class OracleLimitError(RuntimeError):
    """The joint state space outgrew the configured bound."""


@dataclass(frozen=True)
class OracleResult:
    feasible: bool
    soc: Optional[int] = None
    paths: Optional[Tuple[Tuple[Cell, ...], ...]] = None
    expanded: int = 0
    verdict: str = ""


def joint_step(gmap: GridMap, agents: Sequence[Cell], boxes: Sequence[Cell], nxt: Sequence[Cell]):
    """Box cells after the joint move ``agents -> nxt``, or None if illegal.

    Rules: agents wait or move to an adjacent free cell; an agent entering a
    box's cell pushes it one cell further in the same direction, and the
    landing cell must be free and hold no box; afterwards no two entities
    share a cell and no two entities traverse one edge in opposite directions.
    """
    box_set = set(boxes)
    moved_boxes = []
    pushed = set()
    for u, v in zip(agents, nxt):
        if u == v:
            continue
        if abs(u[0] - v[0]) + abs(u[1] - v[1]) != 1 or not gmap.is_free(v):
            return None
        if v in box_set:
            if v in pushed:
                return None
            land = (2 * v[0] - u[0], 2 * v[1] - u[1])
            if not gmap.is_free(land) or land in box_set:
                return None
            pushed.add(v)
            moved_boxes.append((v, land))
    new_boxes = (box_set - pushed) | {land for _, land in moved_boxes}
    if len(new_boxes) != len(box_set):
        return None
    occupied = set(nxt)
    if len(occupied) != len(nxt) or occupied & new_boxes:
        return None
    movers = {(u, v) for u, v in zip(agents, nxt) if u != v}
    movers.update(moved_boxes)
    for u, v in movers:
        if (v, u) in movers:
            return None
    return tuple(sorted(new_boxes))


def solve_exact(instance: Instance, horizon: Optional[int] = None, soc_cap: Optional[int] = None,
                max_states: int = DEFAULT_MAX_STATES) -> OracleResult:
    """Optimal sum-of-costs plan, or an infeasibility verdict.

    ``horizon`` bounds the number of time steps explored and ``soc_cap`` the
    cost; either bound turns exhaustion into an "infeasible within bounds"
    verdict. Exceeding ``max_states`` raises OracleLimitError.
    """
    gmap = instance.map
    goals = instance.goals
    n = instance.n_agents
    dists = [gmap.distances_to(g) for g in goals]
    if any(s not in d for s, d in zip(instance.starts, dists)):
        return OracleResult(False, verdict="infeasible: a goal is unreachable even without boxes")
    options = {}
    for c in gmap.free_cells():
        options[c] = [n2 for n2 in ((c[0] + dx, c[1] + dy) for dx, dy in DIRECTIONS) if gmap.is_free(n2)] + [c]
    full = (1 << n) - 1

    def h(agents, mask):
        total = 0
        for i in range(n):
            if not mask >> i & 1:
                total += dists[i][agents[i]]
        return total

    start = (instance.starts, tuple(sorted(instance.boxes)), 0)
    tie = count()
    g_best = {start: 0}
    info = {start: (None, 0)}  # key -> (parent key, time)
    open_ = [(h(start[0], 0), 0, next(tie), start)]
    closed = set()
    bounded = horizon is not None or soc_cap is not None
    while open_:
        f, g, _, key = heapq.heappop(open_)
        if key in closed:
            continue
        closed.add(key)
        if len(closed) > max_states:
            raise OracleLimitError(f"more than {max_states} joint states expanded")
        agents, boxes, mask = key
        if mask == full:
            return OracleResult(True, g, _extract(key, info, n), len(closed), "optimal")
        t = info[key][1]
        succ = []
        for i in range(n):
            if not mask >> i & 1 and agents[i] == goals[i]:
                succ.append(((agents, boxes, mask | 1 << i), 0, t))
        if horizon is None or t < horizon:
            step_cost = n - bin(mask).count("1")
            choices = [options[agents[i]] if not mask >> i & 1 else [agents[i]] for i in range(n)]
            for nxt in product(*choices):
                nb = joint_step(gmap, agents, boxes, nxt)
                if nb is not None:
                    succ.append(((nxt, nb, mask), step_cost, t + 1))
        for nkey, cost, nt in succ:
            ng = g + cost
            if nkey in closed or g_best.get(nkey, ng + 1) <= ng:
                continue
            if any(nkey[0][i] not in dists[i] for i in range(n)):
                continue
            nf = ng + h(nkey[0], nkey[2])
            if soc_cap is not None and nf > soc_cap:
                continue
            g_best[nkey] = ng
            info[nkey] = (key, nt)
            heapq.heappush(open_, (nf, ng, next(tie), nkey))
    verdict = "infeasible within bounds" if bounded else "infeasible"
    return OracleResult(False, expanded=len(closed), verdict=verdict)


def _extract(key, info, n: int):
    chain = []
    while key is not None:
        chain.append(key)
        key = info[key][0]
    chain.reverse()
    timeline = [chain[0][0]]
    finish = [None] * n
    for prev, cur in zip(chain, chain[1:]):
        if cur[0] != prev[0] or cur[2] == prev[2]:
            timeline.append(cur[0])
        for i in range(n):
            if cur[2] >> i & 1 and finish[i] is None:
                finish[i] = len(timeline) - 1
    return tuple(tuple(timeline[t][i] for t in range(finish[i] + 1)) for i in range(n))
