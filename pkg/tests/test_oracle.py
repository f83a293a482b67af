import itertools

import pytest

from mpamo.cbs import solve_cbs
from mpamo.model import GridMap, Instance, sum_of_costs
from mpamo.oracle import OracleLimitError, joint_step, solve_exact
from mpamo.simulation import check, sim_step, validate_solution


def grids_3x3():
    yield GridMap(3, 3)
    for c in GridMap(3, 3).cells():
        yield GridMap(3, 3, frozenset({c}))


def joint_moves(gmap, agents):
    opts = []
    for c in agents:
        opts.append([c] + [n for n in ((c[0] + 1, c[1]), (c[0] - 1, c[1]), (c[0], c[1] + 1), (c[0], c[1] - 1))
                           if gmap.is_free(n)])
    return itertools.product(*opts)


def cross_check(gmaps):
    steps = mismatches = 0
    for gmap in gmaps:
        for combo in itertools.permutations(gmap.free_cells(), 3):
            agents, boxes = combo[:2], (combo[2],)
            for nxt in joint_moves(gmap, agents):
                steps += 1
                legal = joint_step(gmap, agents, boxes, nxt)
                boxes_next, pushes = sim_step(boxes, agents, nxt)
                clean = check(gmap, boxes, boxes_next, agents, nxt, pushes, 1) is None
                if (legal is not None) != clean or (clean and legal != tuple(sorted(boxes_next))):
                    mismatches += 1
    return steps, mismatches


def test_oracle_and_simulator_agree_on_every_3x3_step():
    steps, mismatches = cross_check(grids_3x3())
    assert steps > 35_000
    assert mismatches == 0


def test_single_agent_soc_is_manhattan():
    for goal in [(2, 2), (0, 2), (2, 0), (1, 1)]:
        res = solve_exact(Instance(GridMap(3, 3), (((0, 0), goal),)))
        assert res.feasible and res.soc == goal[0] + goal[1]


def test_push_along_corridor():
    res = solve_exact(Instance(GridMap(5, 1), (((0, 0), (2, 0)),), ((1, 0),)))
    assert res.feasible and res.soc == 2
    assert res.paths == (((0, 0), (1, 0), (2, 0)),)


def test_push_off_map_is_infeasible():
    res = solve_exact(Instance(GridMap(3, 1), (((0, 0), (2, 0)),), ((1, 0),)))
    assert not res.feasible and res.verdict == "infeasible"


def test_bounds_give_bounded_verdict():
    inst = Instance(GridMap(4, 1), (((0, 0), (3, 0)),))
    assert solve_exact(inst, horizon=2).verdict == "infeasible within bounds"
    assert solve_exact(inst, soc_cap=2).verdict == "infeasible within bounds"
    assert solve_exact(inst, horizon=3).soc == 3


def test_state_limit_refuses():
    inst = Instance(GridMap(4, 4), (((0, 0), (3, 3)), ((3, 0), (0, 3)), ((0, 3), (3, 0))), ((1, 1), (2, 2)))
    with pytest.raises(OracleLimitError):
        solve_exact(inst, max_states=50)


def test_finished_agents_stay_and_paths_validate():
    # agent 1 steps aside and back while agent 2 follows it through
    inst = Instance(GridMap(3, 2, frozenset({(0, 1), (2, 1)})), (((1, 0), (1, 0)), ((0, 0), (2, 0))))
    res = solve_exact(inst)
    assert res.feasible
    assert validate_solution(inst, res.paths).ok
    assert res.soc == sum_of_costs(res.paths) == 4


def test_oracle_bounds_solver_costs_from_below():
    cases = [
        Instance(GridMap(4, 3), (((0, 1), (3, 1)), ((3, 1), (0, 1))), ((1, 0),)),
        Instance(GridMap(4, 4), (((0, 0), (3, 3)), ((3, 0), (0, 3))), ((1, 1), (2, 2))),
        Instance(GridMap(3, 3), (((0, 1), (2, 1)), ((1, 0), (1, 2))), ((1, 1),)),
    ]
    for inst in cases:
        opt = solve_exact(inst)
        for ll in ("moh", "mol"):
            paths, stats = solve_cbs(inst, ll, time_limit=10)
            if paths is None:
                continue
            assert validate_solution(inst, paths).ok
            assert sum_of_costs(paths) >= opt.soc
