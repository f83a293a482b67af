"""Multi-agent path finding among movable obstacles (pushable boxes).

Planners: CBS-MOH, CBS-MOL, PP-PAMO*, plus an exact joint-space oracle,
a simulator/validator and a small benchmark harness.
"""

from mpamo.model import (
    BoxConfig,
    GridMap,
    Instance,
    InstanceError,
    neighbors,
    push_target,
    sum_of_costs,
    makespan,
)
from mpamo.simulation import SimResult, ValidationError, sim_and_conflict_check, validate_solution
from mpamo.cbs import SolveStats, solve_cbs
from mpamo.pp import solve_pp
from mpamo.oracle import solve_exact

__all__ = [
    "BoxConfig",
    "GridMap",
    "Instance",
    "InstanceError",
    "SimResult",
    "SolveStats",
    "ValidationError",
    "makespan",
    "neighbors",
    "push_target",
    "sim_and_conflict_check",
    "solve_cbs",
    "solve_exact",
    "solve_pp",
    "sum_of_costs",
    "validate_solution",
]
