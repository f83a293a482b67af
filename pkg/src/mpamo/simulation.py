"""Forward simulation of box motion under a joint path, and conflict detection.

Box positions are full tuples indexed by box id. A step is simulated in two
phases: ``sim_step`` moves every pushed box to its tentative cell, then
``check`` reports the first violation under a fixed scan order:

    BPR, AA vertex, AA edge, AB vertex, AB edge, BB vertex, BB edge

with ties broken by ascending ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

from mpamo.conflicts import (
    AAEdge,
    AAVertex,
    ABEdge,
    ABVertex,
    BBEdge,
    BBVertex,
    BprViolation,
    describe,
)
from mpamo.model import Cell, GridMap, Instance, is_adjacent, makespan, sum_of_costs

CLEAN = "clean"
CONFLICT = "conflict"
BPR = "bpr"


class ValidationError(ValueError):
    """A joint path is malformed (bad step, off-map or static-obstacle cell)."""


@dataclass(frozen=True)
class SimResult:
    outcome: str
    conflict: object = None
    # per-timestep box positions; only filled for clean runs
    box_trajectory: Tuple[Tuple[Cell, ...], ...] = ()

    @property
    def clean(self) -> bool:
        return self.outcome == CLEAN


def sim_step(boxes_prev: Sequence[Cell], agents_prev: Sequence[Cell], agents_next: Sequence[Cell]):
    """Tentatively move every box an agent walks into.

    Returns ``(boxes_next, pushes)`` where ``pushes`` maps box id to the
    pushing agent id. Collisions and off-map targets are left for ``check``.
    """
    where = {c: k for k, c in enumerate(boxes_prev)}
    boxes_next = list(boxes_prev)
    pushes = {}
    for a, (u, v) in enumerate(zip(agents_prev, agents_next)):
        if u == v:
            continue
        k = where.get(v)
        if k is None or k in pushes:
            continue
        pushes[k] = a
        boxes_next[k] = (2 * v[0] - u[0], 2 * v[1] - u[1])
    return tuple(boxes_next), pushes


def check(gmap: GridMap, boxes_prev, boxes_next, agents_prev, agents_next, pushes, t: int):
    """First violation of step ``t`` in scan order, or None when clean."""
    n_agents = len(agents_next)

    for k, a in sorted(pushes.items(), key=lambda kv: (kv[1], kv[0])):
        if not gmap.is_free(boxes_next[k]):
            return BprViolation(a, (agents_prev[a], agents_next[a]), t)

    agent_at = {}
    for a, c in enumerate(agents_next):
        agent_at.setdefault(c, []).append(a)
    for a in range(n_agents):
        occ = agent_at[agents_next[a]]
        if len(occ) > 1 and occ[0] == a:
            return AAVertex(a, occ[1], agents_next[a], t)

    agent_edge = {}
    for a in range(n_agents):
        if agents_prev[a] != agents_next[a]:
            agent_edge[(agents_prev[a], agents_next[a])] = a
    for a in range(n_agents):
        u, v = agents_prev[a], agents_next[a]
        if u == v:
            continue
        b = agent_edge.get((v, u))
        if b is not None and b > a:
            return AAEdge(a, b, (u, v), t)

    def pusher_of(k):
        j = pushes[k]
        return j, (agents_prev[j], agents_next[j])

    box_at = {}
    for k, c in enumerate(boxes_next):
        box_at.setdefault(c, []).append(k)
    for a in range(n_agents):
        ks = box_at.get(agents_next[a])
        if ks:
            k = ks[0]
            j, e = pusher_of(k)
            return ABVertex(a, k, agents_next[a], t, j, e)

    box_edge = {(boxes_prev[k], boxes_next[k]): k for k in pushes}
    if box_edge:
        for a in range(n_agents):
            u, v = agents_prev[a], agents_next[a]
            if u == v:
                continue
            k = box_edge.get((v, u))
            if k is not None:
                j, e = pusher_of(k)
                return ABEdge(a, k, (u, v), t, j, e)

    if pushes:
        clash = None
        for ks in box_at.values():
            if len(ks) > 1 and (clash is None or (ks[0], ks[1]) < clash):
                clash = (ks[0], ks[1])
        if clash is not None:
            m, n = clash
            return BBVertex(m, n, boxes_next[m], t,
                            pusher_of(m) if m in pushes else None,
                            pusher_of(n) if n in pushes else None)
        for m in sorted(pushes):
            n = box_edge.get((boxes_next[m], boxes_prev[m]))
            if n is not None and n > m:
                return BBEdge(m, n, (boxes_prev[m], boxes_next[m]), t, pusher_of(m), pusher_of(n))
    return None


def check_paths(instance: Instance, jp: Sequence[Sequence[Cell]]):
    """Raise ValidationError unless every path is a walk on free cells."""
    gmap = instance.map
    if len(jp) != instance.n_agents:
        raise ValidationError(f"joint path has {len(jp)} paths for {instance.n_agents} agents")
    for a, path in enumerate(jp):
        if not path:
            raise ValidationError(f"agent {a + 1}: empty path")
        for t, c in enumerate(path):
            if not gmap.in_bounds(c):
                raise ValidationError(f"agent {a + 1}: cell {c} at t={t} is off the map")
            if c in gmap.static_obstacles:
                raise ValidationError(f"agent {a + 1}: cell {c} at t={t} is a static obstacle")
            if t and c != path[t - 1] and not is_adjacent(path[t - 1], c):
                raise ValidationError(f"agent {a + 1}: jump {path[t - 1]} -> {c} at t={t}")


def sim_and_conflict_check(instance: Instance, jp: Sequence[Sequence[Cell]]) -> SimResult:
    """Simulate the boxes along ``jp`` and return the first violation in time order."""
    check_paths(instance, jp)
    gmap = instance.map
    t_max = makespan(jp)
    boxes = tuple(instance.boxes)
    trajectory = [boxes]
    agents = tuple(p[0] for p in jp)
    for t in range(1, t_max + 1):
        nxt = tuple(p[t] if t < len(p) else p[-1] for p in jp)
        boxes_next, pushes = sim_step(boxes, agents, nxt)
        found = check(gmap, boxes, boxes_next, agents, nxt, pushes, t)
        if found is not None:
            return SimResult(BPR if isinstance(found, BprViolation) else CONFLICT, found)
        boxes, agents = boxes_next, nxt
        trajectory.append(boxes)
    return SimResult(CLEAN, None, tuple(trajectory))


@dataclass
class ValidationReport:
    ok: bool
    soc: Optional[int] = None
    makespan: Optional[int] = None
    problems: list = field(default_factory=list)
    result: Optional[SimResult] = None

    def __str__(self):
        lines = ["PASS" if self.ok else "FAIL"]
        if self.soc is not None:
            lines.append(f"soc: {self.soc}")
            lines.append(f"makespan: {self.makespan}")
        lines.extend(f"problem: {p}" for p in self.problems)
        return "\n".join(lines)


def validate_solution(instance: Instance, jp: Sequence[Sequence[Cell]]) -> ValidationReport:
    report = ValidationReport(ok=False)
    try:
        check_paths(instance, jp)
    except ValidationError as exc:
        report.problems.append(str(exc))
        return report
    for a, ((s, g), path) in enumerate(zip(instance.agents, jp)):
        if tuple(path[0]) != s:
            report.problems.append(f"agent {a + 1}: path starts at {path[0]}, expected {s}")
        if tuple(path[-1]) != g:
            report.problems.append(f"agent {a + 1}: path ends at {path[-1]}, expected {g}")
    res = sim_and_conflict_check(instance, jp)
    report.result = res
    if not res.clean:
        report.problems.append(describe(res.conflict))
    report.soc = sum_of_costs(jp)
    report.makespan = makespan(jp)
    report.ok = not report.problems
    return report
