"""Text formats: map files, agent (scenario) files, solution records.

Map file::

    height H
    width W
    map
    <H rows of W characters from '.', '@', 'B'>

Boxes are numbered in row-major order of their ``B`` characters. An agent
file holds one ``sx sy gx gy`` line per agent; ``#`` lines are comments.
Solution records are JSON objects with a frozen field set.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from mpamo.model import GridMap, Instance, makespan, sum_of_costs

FREE, STATIC, BOX = ".", "@", "B"


class FormatError(ValueError):
    """Malformed input file; the message names the offending line."""


def parse_map(text: str):
    """Return ``(GridMap, boxes)`` parsed from map-file text."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 3:
        raise FormatError("line 1: expected 'height H', 'width W' and 'map' header lines")
    height = _header(lines[0], "height", 1)
    width = _header(lines[1], "width", 2)
    if lines[2].strip() != "map":
        raise FormatError(f"line 3: expected 'map', got {lines[2]!r}")
    rows = lines[3:]
    if len(rows) != height:
        raise FormatError(f"line {3 + len(rows)}: expected {height} map rows, got {len(rows)}")
    static, boxes = set(), []
    for y, row in enumerate(rows):
        lineno = y + 4
        if len(row) != width:
            raise FormatError(f"line {lineno}: map row {y} has {len(row)} characters, expected {width}")
        for x, ch in enumerate(row):
            if ch == STATIC:
                static.add((x, y))
            elif ch == BOX:
                boxes.append((x, y))
            elif ch != FREE:
                raise FormatError(f"line {lineno}, column {x + 1}: unexpected character {ch!r}")
    return GridMap(width, height, frozenset(static)), tuple(boxes)


def _header(line: str, key: str, lineno: int) -> int:
    parts = line.split()
    if len(parts) != 2 or parts[0] != key:
        raise FormatError(f"line {lineno}: expected '{key} <int>', got {line!r}")
    try:
        value = int(parts[1])
    except ValueError:
        raise FormatError(f"line {lineno}: {key} {parts[1]!r} is not an integer") from None
    if value <= 0:
        raise FormatError(f"line {lineno}: {key} must be positive")
    return value


def format_map(gmap: GridMap, boxes=()) -> str:
    box_set = set(boxes)
    rows = []
    for y in range(gmap.height):
        row = []
        for x in range(gmap.width):
            c = (x, y)
            row.append(STATIC if c in gmap.static_obstacles else BOX if c in box_set else FREE)
        rows.append("".join(row))
    return f"height {gmap.height}\nwidth {gmap.width}\nmap\n" + "\n".join(rows) + "\n"


def parse_agents(text: str) -> tuple:
    agents = []
    for lineno, line in enumerate(text.split("\n"), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split(" ")
        try:
            sx, sy, gx, gy = (int(p) for p in parts)
        except ValueError:
            raise FormatError(f"line {lineno}: expected four integers 'sx sy gx gy', got {line!r}") from None
        agents.append(((sx, sy), (gx, gy)))
    return tuple(agents)


def format_agents(agents) -> str:
    return "".join(f"{s[0]} {s[1]} {g[0]} {g[1]}\n" for s, g in agents)


def load_instance(map_path, agents_path) -> Instance:
    gmap, boxes = parse_map(Path(map_path).read_text())
    agents = parse_agents(Path(agents_path).read_text())
    return Instance(gmap, agents, boxes)


def save_instance(instance: Instance, map_path, agents_path):
    Path(map_path).write_text(format_map(instance.map, instance.boxes))
    Path(agents_path).write_text(format_agents(instance.agents))


@dataclass
class Solution:
    algorithm: str
    solved: bool
    soc: int = -1
    makespan: int = -1
    runtime_ms: int = 0
    hl_generated: int = 0
    hl_expanded: int = 0
    ll_expansions: int = 0
    paths: list = field(default_factory=list)
    config_echo: dict = field(default_factory=dict)

    def joint_path(self) -> tuple:
        return tuple(tuple(tuple(c) for c in p) for p in self.paths)


SOLUTION_FIELDS = tuple(Solution.__dataclass_fields__)


def write_solution(sol: Solution) -> str:
    """Serialize deterministically: fixed key order, one path per line."""
    d = asdict(sol)
    lines = ["{"]
    for k in SOLUTION_FIELDS:
        v = d[k]
        if k == "paths":
            if v:
                body = ",\n".join("    " + json.dumps([list(c) for c in p], separators=(",", ":")) for p in v)
                text = "[\n" + body + "\n  ]"
            else:
                text = "[]"
        elif k == "config_echo":
            text = json.dumps(v, sort_keys=True)
        else:
            text = json.dumps(v)
        lines.append(f'  "{k}": {text},')
    lines[-1] = lines[-1][:-1]
    lines.append("}")
    return "\n".join(lines) + "\n"


def read_solution(text: str) -> Solution:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(d, dict):
        raise FormatError("solution must be a JSON object")
    unknown = sorted(set(d) - set(SOLUTION_FIELDS))
    if unknown:
        raise FormatError(f"unknown solution field(s): {', '.join(unknown)}")
    missing = [k for k in SOLUTION_FIELDS if k not in d]
    if missing:
        raise FormatError(f"missing solution field(s): {', '.join(missing)}")
    try:
        d["paths"] = [[(int(c[0]), int(c[1])) for c in p] for p in d["paths"]]
    except (TypeError, ValueError, IndexError):
        raise FormatError("paths must be lists of [x, y] pairs") from None
    return Solution(**d)


def load_solution(path) -> Solution:
    return read_solution(Path(path).read_text())


def solution_from_stats(algorithm: str, paths: Optional[tuple], stats, config_echo: dict,
                        timing: bool = True) -> Solution:
    solved = paths is not None
    return Solution(
        algorithm=algorithm,
        solved=solved,
        soc=sum_of_costs(paths) if solved else -1,
        makespan=makespan(paths) if solved else -1,
        runtime_ms=int(round(stats.runtime * 1000)) if timing else 0,
        hl_generated=stats.hl_generated,
        hl_expanded=stats.hl_expanded,
        ll_expansions=stats.ll_expansions,
        paths=[list(p) for p in paths] if solved else [],
        config_echo=config_echo,
    )
