"""Command line: ``mpamo {solve,validate,render,oracle,generate,bench,report}``.

Exit codes: 0 success, 1 usage or parse error, 2 unsolved / invalid.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from mpamo.bench import ALGORITHMS, BenchConfig, generate_instance, rows_to_csv, run_algorithm, \
    run_benchmark, summarize, summary_to_csv
from mpamo.io import FormatError, Solution, load_instance, load_solution, save_instance, \
    solution_from_stats, write_solution
from mpamo.model import InstanceError, makespan
from mpamo.oracle import DEFAULT_MAX_STATES, OracleLimitError, solve_exact
from mpamo.simulation import sim_step, validate_solution
from mpamo.spacetime import DEFAULT_HORIZON_FACTOR

EXIT_OK, EXIT_USAGE, EXIT_UNSOLVED = 0, 1, 2


def render_frames(instance, jp) -> list:
    """One text frame per time step, 0..makespan.

    '.' free, '@' static, 'a'.. boxes, '1'.. agents, '*' uncovered goals.
    """
    gmap = instance.map
    jp = [tuple(p) for p in jp] if jp else [(s,) for s in instance.starts]
    boxes = tuple(instance.boxes)
    agents = tuple(p[0] for p in jp)
    frames = []
    for t in range(makespan(jp) + 1):
        if t:
            nxt = tuple(p[min(t, len(p) - 1)] for p in jp)
            boxes, _ = sim_step(boxes, agents, nxt)
            agents = nxt
        grid = [["@" if (x, y) in gmap.static_obstacles else "." for x in range(gmap.width)]
                for y in range(gmap.height)]
        for g in instance.goals:
            grid[g[1]][g[0]] = "*"
        for k, b in enumerate(boxes):
            if gmap.in_bounds(b):
                grid[b[1]][b[0]] = chr(ord("a") + k % 26)
        for a, c in enumerate(agents):
            grid[c[1]][c[0]] = str((a + 1) % 10)
        frames.append(f"t={t}\n" + "\n".join("".join(r) for r in grid))
    return frames


def _priority(text):
    if text is None:
        return None
    try:
        return [int(p) for p in text.split(",")]
    except ValueError:
        raise ValueError(f"--priority-order expects a comma list of agent ids, got {text!r}")


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    inst = load_instance(args.map, args.agents)
    order = _priority(args.priority_order)
    paths, stats = run_algorithm(inst, args.algo, args.time_limit_s or None, args.horizon_factor, order,
                                 args.include_hp_box_occupancy, args.max_hl_expansions, args.max_ll_expansions)
    echo = {
        "algo": args.algo,
        "time_limit_s": args.time_limit_s,
        "horizon_factor": args.horizon_factor,
        "seed": args.seed,
        "priority_order": order,
        "include_hp_box_occupancy": args.include_hp_box_occupancy,
        "max_hl_expansions": args.max_hl_expansions,
        "max_ll_expansions": args.max_ll_expansions,
        "timing": not args.no_timing,
        "outcome": stats.outcome,
    }
    sol = solution_from_stats(args.algo, paths, stats, echo, timing=not args.no_timing)
    _emit(write_solution(sol), args.out)
    if paths is None:
        print(f"unsolved: {stats.outcome} {stats.message}".rstrip(), file=sys.stderr)
        return EXIT_UNSOLVED
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = load_instance(args.map, args.agents)
    sol = load_solution(args.solution)
    report = validate_solution(inst, sol.joint_path())
    print(report)
    return EXIT_OK if report.ok else EXIT_UNSOLVED


def cmd_render(args) -> int:
    inst = load_instance(args.map, args.agents)
    jp = load_solution(args.solution).joint_path() if args.solution else None
    print("\n\n".join(render_frames(inst, jp)))
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = load_instance(args.map, args.agents)
    try:
        res = solve_exact(inst, args.horizon, args.soc_cap, args.max_states)
    except OracleLimitError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_UNSOLVED
    sol = Solution("oracle", res.feasible, res.soc if res.feasible else -1,
                   makespan(res.paths) if res.feasible else -1, 0, 0, 0, res.expanded,
                   [list(p) for p in res.paths] if res.feasible else [],
                   {"horizon": args.horizon, "soc_cap": args.soc_cap, "max_states": args.max_states,
                    "verdict": res.verdict})
    _emit(write_solution(sol), args.out)
    return EXIT_OK if res.feasible else EXIT_UNSOLVED


def cmd_generate(args) -> int:
    inst = generate_instance(args.width, args.height, args.static_density, args.box_density, args.agents,
                             args.seed, map_seed=args.map_seed)
    save_instance(inst, args.out_map, args.out_agents)
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = BenchConfig.load(args.config)
    if args.no_timing:
        cfg.timing = False
    if args.workers:
        cfg.workers = args.workers

    def progress(row):
        logging.info("%s box=%s n=%d seed=%d %s: %s", row.map, row.box_density, row.agents,
                     row.instance_seed, row.algo, "solved" if row.solved else "unsolved")

    rows = run_benchmark(cfg, progress)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(rows_to_csv(rows))
    summary = summary_to_csv(summarize(rows, cfg.algorithms))
    if args.figures:
        from mpamo.report import render_report

        for p in render_report(out, args.figures):
            print(p)
    else:
        sys.stdout.write(summary)
    return EXIT_OK


def cmd_report(args) -> int:
    from mpamo.report import render_report

    for p in render_report(args.results, args.out_dir):
        print(p)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mpamo", description="Multi-agent path finding among movable obstacles")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance")
    p.add_argument("map")
    p.add_argument("agents")
    p.add_argument("--algo", choices=ALGORITHMS, default="cbs-mol")
    p.add_argument("--time-limit-s", type=float, default=60.0, help="wall-clock limit; 0 disables it")
    p.add_argument("--horizon-factor", type=float, default=DEFAULT_HORIZON_FACTOR)
    p.add_argument("--seed", type=int, default=0, help="recorded in config_echo; the planners are deterministic")
    p.add_argument("--out", help="solution file (default: stdout)")
    p.add_argument("--priority-order", help="pp-pamo: comma list of 0-based agent ids, highest first")
    p.add_argument("--include-hp-box-occupancy", action="store_true",
                   help="pp-pamo: also avoid boxes displaced by higher-priority agents")
    p.add_argument("--max-hl-expansions", type=int, help="cbs: clock-free budget on constraint-tree expansions")
    p.add_argument("--max-ll-expansions", type=int, help="clock-free budget on low-level search expansions")
    p.add_argument("--no-timing", action="store_true", help="record runtime_ms as 0 for byte-stable output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check a solution file against an instance")
    p.add_argument("map")
    p.add_argument("agents")
    p.add_argument("solution")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("render", help="print one text frame per time step")
    p.add_argument("map")
    p.add_argument("agents")
    p.add_argument("solution", nargs="?")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("oracle", help="exact joint-space solve of a micro instance")
    p.add_argument("map")
    p.add_argument("agents")
    p.add_argument("--horizon", type=int)
    p.add_argument("--soc-cap", type=int)
    p.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("generate", help="write a seeded random instance")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--static-density", type=float, default=0.0)
    p.add_argument("--box-density", type=float, default=0.1)
    p.add_argument("--agents", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--map-seed", type=int)
    p.add_argument("--out-map", required=True)
    p.add_argument("--out-agents", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", help="run a benchmark sweep from a JSON config")
    p.add_argument("config")
    p.add_argument("--out", required=True, help="results CSV")
    p.add_argument("--figures", metavar="DIR", help="also render the summary and figures into DIR")
    p.add_argument("--workers", type=int)
    p.add_argument("--no-timing", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="summary CSV and figures from a results CSV")
    p.add_argument("results")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (FormatError, InstanceError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
