"""Constraint-tree high level shared by CBS-MOH and CBS-MOL.

The two variants differ only in the single-agent planner: CBS-MOH uses
box-blind space-time A*, CBS-MOL uses ST-PAMO* over the initial boxes.
Boxes are handled on the high level by simulating the joint path.
"""

from __future__ import annotations

import heapq
import logging
import time
from dataclasses import dataclass, field
from itertools import count
from typing import Optional

from mpamo.conflicts import describe, generate_constraints
from mpamo.model import Instance, sum_of_costs
from mpamo.simulation import sim_and_conflict_check
from mpamo.spacetime import (DEFAULT_HORIZON_FACTOR, BudgetExhausted, ConstraintTable, SearchTimeout,
                             default_horizon, plan_moh)
from mpamo.stpamo import plan_st_pamo

log = logging.getLogger(__name__)

SOLVED = "solved"
TIMEOUT = "timeout"
STUCK = "stuck"
INFEASIBLE_ROOT = "infeasible-root"
EXHAUSTED = "exhausted"
LIMIT = "limit"
FAILED = "failed"

LOW_LEVELS = ("moh", "mol")


@dataclass
class SolveStats:
    hl_generated: int = 0
    hl_expanded: int = 0
    ll_calls: int = 0
    ll_expansions: int = 0
    guard_calls: int = 0
    stuck_branches: int = 0
    runtime: float = 0.0
    outcome: str = ""
    message: str = ""

    @property
    def solved(self) -> bool:
        return self.outcome == SOLVED


@dataclass
class CTNode:
    paths: tuple
    cost: int
    constraints: frozenset
    parent: Optional[int] = None
    depth: int = 0
    id: int = 0
    per_agent: dict = field(default_factory=dict)


class _LowLevel:
    def __init__(self, instance: Instance, kind: str, horizon_factor: float, stats: SolveStats, deadline,
                 max_ll_expansions: Optional[int] = None):
        if kind not in LOW_LEVELS:
            raise ValueError(f"unknown low level {kind!r}; expected one of {LOW_LEVELS}")
        self.instance = instance
        self.kind = kind
        self.factor = horizon_factor
        self.stats = stats
        self.deadline = deadline
        self.max_ll = max_ll_expansions
        self.dist = [instance.map.distances_to(g) for g in instance.goals]

    def __call__(self, agent: int, constraints):
        inst = self.instance
        start, goal = inst.agents[agent]
        table = ConstraintTable(constraints, goal)
        horizon = default_horizon(inst.map, table.max_t, self.factor)
        self.stats.ll_calls += 1
        budget = None if self.max_ll is None else self.max_ll - self.stats.ll_expansions
        if self.kind == "moh":
            return plan_moh(inst.map, start, goal, table, horizon, self.dist[agent], self.stats, self.deadline,
                            budget)
        return plan_st_pamo(inst, agent, table, horizon=horizon, dist=self.dist[agent],
                            stats=self.stats, deadline=self.deadline, budget=budget)


def solve_cbs(instance: Instance, low_level: str = "moh", time_limit: Optional[float] = 60.0,
              horizon_factor: float = DEFAULT_HORIZON_FACTOR, max_hl_expansions: Optional[int] = None,
              max_ll_expansions: Optional[int] = None):
    """Run the constraint-tree search.

    ``max_hl_expansions`` and ``max_ll_expansions`` are clock-free budgets
    (outcome ``"limit"``), for runs that must repeat exactly.

    Returns ``(paths, stats)``; ``paths`` is None unless ``stats.outcome`` is
    ``"solved"``. Low-level failure prunes a child; a child whose constraint is
    already present, or whose replanned path is unchanged, is closed as stuck.
    """
    stats = SolveStats()
    t0 = time.perf_counter()
    deadline = None if time_limit is None else t0 + time_limit
    plan = _LowLevel(instance, low_level, horizon_factor, stats, deadline, max_ll_expansions)
    try:
        paths = _search(instance, plan, stats, deadline, max_hl_expansions)
    except BudgetExhausted:
        paths = None
        stats.outcome = LIMIT
    except SearchTimeout:
        paths = None
        stats.outcome = TIMEOUT
    stats.runtime = time.perf_counter() - t0
    log.debug("cbs-%s: %s after %d expansions", low_level, stats.outcome, stats.hl_expanded)
    return paths, stats


def _search(instance, plan, stats, deadline, max_hl_expansions):
    root_paths = []
    for a in range(instance.n_agents):
        p = plan(a, ())
        if p is None:
            stats.outcome = INFEASIBLE_ROOT
            stats.message = f"no path for agent {a + 1} without constraints"
            return None
        root_paths.append(p)
    root = CTNode(tuple(root_paths), sum_of_costs(root_paths), frozenset(),
                  per_agent={a: () for a in range(instance.n_agents)})
    ids = count()
    root.id = next(ids)
    tie = count()
    open_ = [(root.cost, 0, next(tie), root)]
    stats.hl_generated = 1

    while open_:
        if deadline is not None and time.perf_counter() > deadline:
            stats.outcome = TIMEOUT
            return None
        if max_hl_expansions is not None and stats.hl_expanded >= max_hl_expansions:
            stats.outcome = LIMIT
            return None
        _, _, _, node = heapq.heappop(open_)
        stats.hl_expanded += 1
        res = sim_and_conflict_check(instance, node.paths)
        if res.clean:
            stats.outcome = SOLVED
            return node.paths
        for w in generate_constraints(res.conflict):
            a = w.agent
            if w in node.constraints:
                stats.stuck_branches += 1
                stats.message = f"repeated constraint: {describe(res.conflict)}"
                continue
            agent_cs = node.per_agent.get(a, ()) + (w,)
            p = plan(a, agent_cs)
            if p is None:
                continue
            if p == node.paths[a]:
                stats.stuck_branches += 1
                stats.message = f"replanning left agent {a + 1} unchanged: {describe(res.conflict)}"
                continue
            paths = node.paths[:a] + (p,) + node.paths[a + 1:]
            per_agent = dict(node.per_agent)
            per_agent[a] = agent_cs
            child = CTNode(paths, sum_of_costs(paths), node.constraints | {w}, node.id,
                           node.depth + 1, next(ids), per_agent)
            heapq.heappush(open_, (child.cost, len(child.constraints), next(tie), child))
            stats.hl_generated += 1
    stats.outcome = STUCK if stats.stuck_branches else EXHAUSTED
    return None
