"""PP-PAMO*: fixed-priority planning with ST-PAMO*.

Agents are planned one at a time; already planned agents become dynamic
obstacles, and a lower-priority agent may never push a box onto a cell a
higher-priority agent still visits. Each agent plans among the *initial*
boxes, so the joint result is re-simulated before it is accepted.
"""

from __future__ import annotations

import time
from functools import partial
from typing import Optional, Sequence

from mpamo.cbs import FAILED, LIMIT, SOLVED, TIMEOUT, SolveStats
from mpamo.conflicts import describe
from mpamo.model import Cell, Instance
from mpamo.simulation import sim_and_conflict_check
from mpamo.spacetime import DEFAULT_HORIZON_FACTOR, BudgetExhausted, SearchTimeout, default_horizon
from mpamo.stpamo import DynamicObstacles, plan_st_pamo


def no_affect_planned_paths(box_new_cell: Cell, t: int, higher_paths: Sequence[Sequence[Cell]]) -> bool:
    """True iff no higher-priority agent is on ``box_new_cell`` at any time >= t.

    Agents rest at their last cell forever, so a path ending there blocks it.
    """
    for p in higher_paths:
        if p[-1] == box_new_cell:
            return False
        if any(c == box_new_cell for c in p[t:]):
            return False
    return True


def solve_pp(instance: Instance, priority_order: Optional[Sequence[int]] = None,
             time_limit: Optional[float] = 60.0, horizon_factor: float = DEFAULT_HORIZON_FACTOR,
             include_hp_box_occupancy: bool = False, max_ll_expansions: Optional[int] = None):
    """Plan agents in ``priority_order`` (default: index order).

    ``max_ll_expansions`` caps the total search effort independently of the
    clock (outcome ``"limit"``).

    Returns ``(paths, stats)`` with ``paths`` None on failure.
    """
    n = instance.n_agents
    order = list(range(n)) if priority_order is None else list(priority_order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"priority order {order} is not a permutation of 0..{n - 1}")
    stats = SolveStats()
    t0 = time.perf_counter()
    deadline = None if time_limit is None else t0 + time_limit
    planned = {}
    try:
        for rank, a in enumerate(order):
            higher = [planned[b] for b in order[:rank]]
            dyn = DynamicObstacles(higher, instance, include_hp_box_occupancy)
            horizon = default_horizon(instance.map, dyn.end, horizon_factor)
            stats.ll_calls += 1
            guard = partial(no_affect_planned_paths, higher_paths=higher)
            budget = None if max_ll_expansions is None else max_ll_expansions - stats.ll_expansions
            p = plan_st_pamo(instance, a, (), dyn=dyn, guard=guard, horizon=horizon,
                             stats=stats, deadline=deadline, budget=budget)
            if p is None:
                stats.outcome = FAILED
                blockers = ", ".join(str(b + 1) for b in order[:rank]) or "none"
                stats.message = f"no path for agent {a + 1} (priority {rank + 1}; planned before it: {blockers})"
                break
            planned[a] = p
    except BudgetExhausted:
        stats.outcome = LIMIT
    except SearchTimeout:
        stats.outcome = TIMEOUT
    paths = None
    if not stats.outcome:
        joint = tuple(planned[a] for a in range(n))
        res = sim_and_conflict_check(instance, joint)
        if res.clean:
            stats.outcome = SOLVED
            paths = joint
        else:
            stats.outcome = FAILED
            stats.message = f"joint plan rejected by simulation: {describe(res.conflict)}"
    stats.runtime = time.perf_counter() - t0
    return paths, stats
