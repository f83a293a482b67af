"""Seeded instance generation and the benchmark sweep.

Densities are converted to counts with ``floor(density * width * height)``.
A map spec places its static obstacles once (``map_seed``); each instance
then draws starts, goals and boxes from its own seed, so the same seeds are
reused across densities and algorithms.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from mpamo.cbs import solve_cbs
from mpamo.io import parse_map
from mpamo.model import GridMap, Instance, sum_of_costs
from mpamo.pp import solve_pp
from mpamo.simulation import validate_solution
from mpamo.spacetime import DEFAULT_HORIZON_FACTOR

log = logging.getLogger(__name__)

ALGORITHMS = ("cbs-moh", "cbs-mol", "pp-pamo")
CSV_HEADER = ("map", "static_density", "box_density", "agents", "algo", "instance_seed",
              "solved", "soc", "runtime_ms", "hl_generated")
SUMMARY_HEADER = ("map", "static_density", "box_density", "agents", "algo", "runs", "solved",
                  "success_rate", "common", "mean_runtime_ms", "mean_soc", "mean_hl_generated")


class BenchError(ValueError):
    pass


def count_for(density: float, width: int, height: int) -> int:
    return math.floor(density * width * height + 1e-9)


def generate_instance(width: int, height: int, static_density: float, box_density: float,
                      n_agents: int, seed: int, map_seed: Optional[int] = None,
                      static_obstacles=None) -> Instance:
    """Random instance; feasibility is not guaranteed.

    Static obstacles come from ``static_obstacles`` when given, otherwise
    they are drawn with ``map_seed`` (defaulting to ``seed``).
    """
    if static_obstacles is None:
        mrng = random.Random(seed if map_seed is None else map_seed)
        all_cells = [(x, y) for y in range(height) for x in range(width)]
        static = frozenset(mrng.sample(all_cells, count_for(static_density, width, height)))
    else:
        static = frozenset(static_obstacles)
    gmap = GridMap(width, height, static)
    free = gmap.free_cells()
    n_boxes = count_for(box_density, width, height)
    if n_agents > len(free):
        raise BenchError(f"{n_agents} agents do not fit into {len(free)} free cells")
    rng = random.Random(seed)
    starts = rng.sample(free, n_agents)
    goals = rng.sample(free, n_agents)
    endpoints = set(starts) | set(goals)
    rest = [c for c in free if c not in endpoints]
    if n_boxes > len(rest):
        raise BenchError(f"{n_boxes} boxes do not fit into {len(rest)} remaining free cells")
    boxes = sorted(rng.sample(rest, n_boxes), key=lambda c: (c[1], c[0]))
    return Instance(gmap, tuple(zip(starts, goals)), tuple(boxes))


def run_algorithm(instance: Instance, algo: str, time_limit: Optional[float] = 60.0,
                  horizon_factor: float = DEFAULT_HORIZON_FACTOR, priority_order=None,
                  include_hp_box_occupancy: bool = False, max_hl_expansions: Optional[int] = None,
                  max_ll_expansions: Optional[int] = None):
    """Dispatch to a planner by name; returns ``(paths, stats)``."""
    if algo == "cbs-moh":
        return solve_cbs(instance, "moh", time_limit, horizon_factor, max_hl_expansions, max_ll_expansions)
    if algo == "cbs-mol":
        return solve_cbs(instance, "mol", time_limit, horizon_factor, max_hl_expansions, max_ll_expansions)
    if algo == "pp-pamo":
        return solve_pp(instance, priority_order, time_limit, horizon_factor, include_hp_box_occupancy,
                        max_ll_expansions)
    raise BenchError(f"unknown algorithm {algo!r}; expected one of {', '.join(ALGORITHMS)}")


@dataclass
class MapSpec:
    name: str
    width: int = 8
    height: int = 8
    static_density: float = 0.0
    map_seed: int = 0
    map_file: Optional[str] = None
    static_obstacles: Optional[frozenset] = None

    def __post_init__(self):
        if self.map_file:
            gmap, _ = parse_map(Path(self.map_file).read_text())
            self.width, self.height = gmap.width, gmap.height
            self.static_obstacles = gmap.static_obstacles
            self.static_density = round(len(gmap.static_obstacles) / (gmap.width * gmap.height), 4)


@dataclass
class BenchConfig:
    maps: list
    box_densities: list
    agent_counts: list
    algorithms: list = field(default_factory=lambda: list(ALGORITHMS))
    instances_per_cell: int = 10
    time_limit_s: Optional[float] = 60.0
    max_hl_expansions: Optional[int] = None
    max_ll_expansions: Optional[int] = None
    seed: int = 0
    horizon_factor: float = DEFAULT_HORIZON_FACTOR
    workers: int = 1
    timing: bool = True

    @classmethod
    def from_dict(cls, d: dict) -> "BenchConfig":
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(d) - known)
        if unknown:
            raise BenchError(f"unknown bench config field(s): {', '.join(unknown)}")
        d = dict(d)
        d["maps"] = [m if isinstance(m, MapSpec) else MapSpec(**m) for m in d.get("maps", [])]
        for algo in d.get("algorithms", ALGORITHMS):
            if algo not in ALGORITHMS:
                raise BenchError(f"unknown algorithm {algo!r}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "BenchConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class RunRow:
    map: str
    static_density: float
    box_density: float
    agents: int
    algo: str
    instance_seed: int
    solved: bool
    soc: int
    runtime_ms: int
    hl_generated: int

    def as_csv(self) -> list:
        return [self.map, _num(self.static_density), _num(self.box_density), self.agents, self.algo,
                self.instance_seed, "true" if self.solved else "false", self.soc, self.runtime_ms,
                self.hl_generated]


def _num(x: float) -> str:
    return repr(float(x))


def _jobs(cfg: BenchConfig):
    for spec in cfg.maps:
        for density in cfg.box_densities:
            for n in cfg.agent_counts:
                for k in range(cfg.instances_per_cell):
                    for algo in cfg.algorithms:
                        yield spec, density, n, cfg.seed + k, algo


def _run_job(args):
    spec, density, n, seed, algo, cfg = args
    inst = generate_instance(spec.width, spec.height, spec.static_density, density, n, seed,
                             map_seed=spec.map_seed, static_obstacles=spec.static_obstacles)
    paths, stats = run_algorithm(inst, algo, cfg.time_limit_s, cfg.horizon_factor,
                                 max_hl_expansions=cfg.max_hl_expansions, max_ll_expansions=cfg.max_ll_expansions)
    if paths is not None:
        report = validate_solution(inst, paths)
        if not report.ok:
            raise RuntimeError(f"{algo} returned an invalid solution on {spec.name} seed {seed}: {report.problems}")
    return RunRow(spec.name, spec.static_density, density, n, algo, seed, paths is not None,
                  sum_of_costs(paths) if paths is not None else -1,
                  int(round(stats.runtime * 1000)) if cfg.timing else 0, stats.hl_generated)


def run_benchmark(cfg: BenchConfig, progress=None) -> list:
    """Run every (map, density, agents, instance, algorithm) job; rows in job order."""
    jobs = [(*j, cfg) for j in _jobs(cfg)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            rows = list(pool.map(_run_job, jobs))
    else:
        rows = []
        for job in jobs:
            rows.append(_run_job(job))
            if progress is not None:
                progress(rows[-1])
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.as_csv())
    return buf.getvalue()


def read_rows(text: str) -> list:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise BenchError(f"unexpected CSV header {reader.fieldnames}")
    return [RunRow(r["map"], float(r["static_density"]), float(r["box_density"]), int(r["agents"]),
                   r["algo"], int(r["instance_seed"]), r["solved"] == "true", int(r["soc"]),
                   int(r["runtime_ms"]), int(r["hl_generated"])) for r in reader]


@dataclass
class CellSummary:
    map: str
    static_density: float
    box_density: float
    agents: int
    algo: str
    runs: int
    solved: int
    common: int
    mean_runtime_ms: Optional[float]
    mean_soc: Optional[float]
    mean_hl_generated: Optional[float]

    @property
    def success_rate(self) -> float:
        return self.solved / self.runs if self.runs else 0.0


def summarize(rows, algorithms=None) -> list:
    """Per-cell success rates plus means over instances solved by every algorithm.

    Cells without a commonly solved instance get None means instead of NaN.
    """
    cells = {}
    for r in rows:
        cells.setdefault((r.map, r.static_density, r.box_density, r.agents), []).append(r)
    out = []
    for key, rs in cells.items():
        algos = list(algorithms) if algorithms else list(dict.fromkeys(r.algo for r in rs))
        by_algo = {a: {r.instance_seed: r for r in rs if r.algo == a} for a in algos}
        common = None
        for a in algos:
            solved = {s for s, r in by_algo[a].items() if r.solved}
            common = solved if common is None else common & solved
        common = sorted(common or ())
        for a in algos:
            runs = by_algo[a]
            picked = [runs[s] for s in common]
            mean = (lambda xs: sum(xs) / len(xs)) if picked else (lambda xs: None)
            out.append(CellSummary(*key, a, len(runs), sum(r.solved for r in runs.values()), len(common),
                                   mean([r.runtime_ms for r in picked]), mean([r.soc for r in picked]),
                                   mean([r.hl_generated for r in picked])))
    return out


def summary_to_csv(summary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    fmt = lambda v: "" if v is None else f"{v:.3f}"
    for s in summary:
        w.writerow([s.map, _num(s.static_density), _num(s.box_density), s.agents, s.algo, s.runs, s.solved,
                    f"{s.success_rate:.3f}", s.common, fmt(s.mean_runtime_ms), fmt(s.mean_soc),
                    fmt(s.mean_hl_generated)])
    return buf.getvalue()
