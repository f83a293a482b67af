"""Conflict records and the constraints that resolve them.

Boxes never receive constraints. A box conflict is resolved by forbidding the
push of the agent that moved the box, so every constraint targets an agent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple, Union

from mpamo.model import Cell, Edge


class VertexConstraint(NamedTuple):
    agent: int
    cell: Cell
    t: int


class EdgeConstraint(NamedTuple):
    """Forbids ``agent`` to traverse ``edge`` arriving at time ``t``."""

    agent: int
    edge: Edge
    t: int


Constraint = Union[VertexConstraint, EdgeConstraint]

# (agent, edge) responsible for moving a box during one step
Pusher = Tuple[int, Edge]


@dataclass(frozen=True)
class AAVertex:
    i: int
    j: int
    cell: Cell
    t: int


@dataclass(frozen=True)
class AAEdge:
    i: int
    j: int
    edge: Edge  # traversed by i; j traverses the reverse
    t: int


@dataclass(frozen=True)
class ABVertex:
    i: int
    box: int
    cell: Cell
    t: int
    pusher: int
    pusher_edge: Edge


@dataclass(frozen=True)
class ABEdge:
    i: int
    box: int
    edge: Edge  # traversed by agent i; the box traverses the reverse
    t: int
    pusher: int
    pusher_edge: Edge


@dataclass(frozen=True)
class BBVertex:
    m: int
    n: int
    cell: Cell
    t: int
    pusher_m: Optional[Pusher]
    pusher_n: Optional[Pusher]


@dataclass(frozen=True)
class BBEdge:
    m: int
    n: int
    edge: Edge  # traversed by box m; box n traverses the reverse
    t: int
    pusher_m: Optional[Pusher]
    pusher_n: Optional[Pusher]


@dataclass(frozen=True)
class BprViolation:
    """A push that drives a box off the map or onto a static obstacle."""

    agent: int
    edge: Edge
    t: int


Conflict = Union[AAVertex, AAEdge, ABVertex, ABEdge, BBVertex, BBEdge]


def generate_constraints(c) -> list:
    """Constraints splitting ``c``; one per child node of the constraint tree.

    Returned in ascending order of constrained agent id (stable for ties).
    """
    if isinstance(c, AAVertex):
        out = [VertexConstraint(c.i, c.cell, c.t), VertexConstraint(c.j, c.cell, c.t)]
    elif isinstance(c, AAEdge):
        u, v = c.edge
        out = [EdgeConstraint(c.i, (u, v), c.t), EdgeConstraint(c.j, (v, u), c.t)]
    elif isinstance(c, ABVertex):
        out = [VertexConstraint(c.i, c.cell, c.t), EdgeConstraint(c.pusher, c.pusher_edge, c.t)]
    elif isinstance(c, ABEdge):
        out = [EdgeConstraint(c.i, c.edge, c.t), EdgeConstraint(c.pusher, c.pusher_edge, c.t)]
    elif isinstance(c, (BBVertex, BBEdge)):
        out = [EdgeConstraint(p[0], p[1], c.t) for p in (c.pusher_m, c.pusher_n) if p is not None]
        if not out:
            raise AssertionError(f"box-box conflict without any pusher: {c}")
    elif isinstance(c, BprViolation):
        out = [EdgeConstraint(c.agent, c.edge, c.t)]
    else:
        raise TypeError(f"not a conflict: {c!r}")
    out.sort(key=lambda w: w.agent)
    return out


def describe(c) -> str:
    """One-line human description; agent and box ids rendered 1-based."""
    if isinstance(c, AAVertex):
        return f"AA vertex conflict: agents {c.i + 1} and {c.j + 1} at {c.cell}, t={c.t}"
    if isinstance(c, AAEdge):
        return f"AA edge conflict: agents {c.i + 1} and {c.j + 1} swap over {c.edge}, t={c.t}"
    if isinstance(c, ABVertex):
        return (f"AB vertex conflict: agent {c.i + 1} and box {c.box + 1} at {c.cell}, t={c.t} "
                f"(pushed by agent {c.pusher + 1} via {c.pusher_edge})")
    if isinstance(c, ABEdge):
        return (f"AB edge conflict: agent {c.i + 1} and box {c.box + 1} swap over {c.edge}, t={c.t} "
                f"(pushed by agent {c.pusher + 1} via {c.pusher_edge})")
    if isinstance(c, (BBVertex, BBEdge)):
        kind = "vertex" if isinstance(c, BBVertex) else "edge"
        where = c.cell if isinstance(c, BBVertex) else c.edge
        pushers = ", ".join(f"agent {p[0] + 1} via {p[1]}" for p in (c.pusher_m, c.pusher_n) if p)
        return f"BB {kind} conflict: boxes {c.m + 1} and {c.n + 1} at {where}, t={c.t} (pushed by {pushers})"
    if isinstance(c, BprViolation):
        return f"BPR violation: agent {c.agent + 1} pushes a box off the free space via {c.edge}, t={c.t}"
    return repr(c)
