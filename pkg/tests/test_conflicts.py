import itertools

import pytest

from mpamo.conflicts import (
    AAEdge,
    AAVertex,
    ABEdge,
    ABVertex,
    BBEdge,
    BBVertex,
    BprViolation,
    EdgeConstraint,
    VertexConstraint,
    describe,
    generate_constraints,
)
from mpamo.model import GridMap
from mpamo.simulation import check, sim_step


def test_ab_vertex_constrains_agent_and_pusher():
    c = ABVertex(0, 2, (3, 1), 4, 1, ((1, 1), (2, 1)))
    assert generate_constraints(c) == [VertexConstraint(0, (3, 1), 4), EdgeConstraint(1, ((1, 1), (2, 1)), 4)]


def test_bpr_yields_single_constraint():
    assert generate_constraints(BprViolation(0, ((1, 0), (2, 0)), 2)) == [EdgeConstraint(0, ((1, 0), (2, 0)), 2)]


def test_aa_vertex_split():
    assert generate_constraints(AAVertex(0, 1, (2, 2), 3)) == [VertexConstraint(0, (2, 2), 3),
                                                                VertexConstraint(1, (2, 2), 3)]


def test_aa_edge_split_reverses_edge_for_second_agent():
    assert generate_constraints(AAEdge(0, 1, ((0, 0), (1, 0)), 1)) == [
        EdgeConstraint(0, ((0, 0), (1, 0)), 1), EdgeConstraint(1, ((1, 0), (0, 0)), 1)]


def test_ab_edge_split():
    c = ABEdge(0, 0, ((1, 0), (2, 0)), 2, 1, ((3, 0), (2, 0)))
    assert generate_constraints(c) == [EdgeConstraint(0, ((1, 0), (2, 0)), 2), EdgeConstraint(1, ((3, 0), (2, 0)), 2)]


def test_bb_constraints_one_per_pusher_sorted_by_agent():
    two = BBVertex(0, 1, (2, 2), 3, (4, ((0, 2), (1, 2))), (1, ((2, 0), (2, 1))))
    assert generate_constraints(two) == [EdgeConstraint(1, ((2, 0), (2, 1)), 3), EdgeConstraint(4, ((0, 2), (1, 2)), 3)]
    one = BBVertex(0, 1, (2, 0), 1, None, (0, ((0, 0), (1, 0))))
    assert generate_constraints(one) == [EdgeConstraint(0, ((0, 0), (1, 0)), 1)]
    edge = BBEdge(0, 1, ((1, 0), (2, 0)), 5, (0, ((0, 0), (1, 0))), (1, ((3, 0), (2, 0))))
    assert len(generate_constraints(edge)) == 2


def test_bb_without_pusher_is_internal_error():
    with pytest.raises(AssertionError):
        generate_constraints(BBVertex(0, 1, (0, 0), 1, None, None))


def test_describe_is_one_based():
    assert "agents 1 and 2" in describe(AAVertex(0, 1, (0, 0), 1))


def _violates(w, prev, nxt, t):
    a = w.agent
    if isinstance(w, VertexConstraint):
        return nxt[a] == w.cell and w.t == t
    return (prev[a], nxt[a]) == w.edge and w.t == t


def _steps(gmap, agents):
    opts = []
    for c in agents:
        opts.append([c] + [n for n in ((c[0] + 1, c[1]), (c[0] - 1, c[1]), (c[0], c[1] + 1), (c[0], c[1] - 1))
                           if gmap.is_free(n)])
    return itertools.product(*opts)


def test_split_is_sound_on_micro_grids():
    """Each generated constraint targets an action of the conflicting step, and
    any step from the same state performing every forbidden action is unclean."""
    gmap = GridMap(3, 3)
    cells = list(gmap.cells())
    checked = 0
    for n_boxes in (1, 2):
        for combo in itertools.permutations(cells, 2 + n_boxes):
            agents, boxes = combo[:2], tuple(sorted(combo[2:]))
            if n_boxes == 2 and combo[2] > combo[3]:
                continue
            for nxt in _steps(gmap, agents):
                bn, pushes = sim_step(boxes, agents, nxt)
                found = check(gmap, boxes, bn, agents, nxt, pushes, 1)
                if found is None:
                    continue
                cons = generate_constraints(found)
                assert all(_violates(w, agents, nxt, 1) for w in cons)
                for other in _steps(gmap, agents):
                    if all(_violates(w, agents, other, 1) for w in cons):
                        bn2, p2 = sim_step(boxes, agents, other)
                        assert check(gmap, boxes, bn2, agents, other, p2, 1) is not None
                checked += 1
    assert checked > 1000
