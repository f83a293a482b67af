"""Random search for the small regression instances kept in tests/data.

Each candidate is checked against the exact solver; matches are printed and,
with --write, saved as ``<name>.map`` / ``<name>.agents``.

    python3 scripts/find_witnesses.py --tries 20000 --write tests/data
"""

import argparse
import random
from pathlib import Path

from mpamo.cbs import solve_cbs
from mpamo.io import format_map, save_instance
from mpamo.model import GridMap, Instance, InstanceError, sum_of_costs
from mpamo.oracle import OracleLimitError, solve_exact
from mpamo.pp import solve_pp
from mpamo.simulation import sim_and_conflict_check
from mpamo.spacetime import plan_moh
from mpamo.stpamo import DynamicObstacles, plan_st_pamo

LIMIT = 2.0


def random_instance(rng):
    w, h = rng.randint(3, 5), rng.randint(2, 5)
    cells = [(x, y) for y in range(h) for x in range(w)]
    statics = rng.sample(cells, rng.randint(0, len(cells) // 3))
    free = [c for c in cells if c not in statics]
    n_boxes = rng.randint(1, 3)
    if len(free) < 4 + n_boxes:
        return None
    pick = rng.sample(free, 4 + n_boxes)
    try:
        return Instance(GridMap(w, h, frozenset(statics)), ((pick[0], pick[1]), (pick[2], pick[3])),
                        tuple(sorted(pick[4:])))
    except InstanceError:
        return None


def soc(paths):
    return None if paths is None else sum_of_costs(paths)


def initial_waits(path):
    k = 0
    while k + 1 < len(path) and path[k + 1] == path[0]:
        k += 1
    return k


def first_push_is_east(inst, path):
    """The first box the agent walks into (instance boxes only) is pushed east."""
    for u, v in zip(path, path[1:]):
        if v in inst.boxes:
            return v == (u[0] + 1, u[1])
    return False


def fig1_score(inst, opt, moh, mol):
    """Lower is closer to the motivating example; None if it does not match."""
    root = tuple(plan_moh(inst.map, s, g) for s, g in inst.agents)
    if sim_and_conflict_check(inst, root).clean:
        return None
    if plan_st_pamo(inst, 1, dyn=DynamicObstacles([root[0]], inst, include_boxes=True)) is not None:
        return None
    for p in (moh[0], mol[0]):
        if initial_waits(p) == 0 or not first_push_is_east(inst, p):
            return None
    return abs(initial_waits(moh[0]) - 2) + abs(initial_waits(mol[0]) - 2) + abs(initial_waits(opt.paths[0]) - 2)


def classify(inst):
    try:
        opt = solve_exact(inst, max_states=100_000)
    except OracleLimitError:
        return []
    if not opt.feasible:
        return []
    moh, s_moh = solve_cbs(inst, "moh", LIMIT)
    mol, s_mol = solve_cbs(inst, "mol", LIMIT)
    found = []
    if mol is not None and moh is not None and soc(moh) == opt.soc < soc(mol):
        found.append("mol_suboptimal")
    if mol is not None and moh is not None and soc(mol) == opt.soc < soc(moh):
        found.append("moh_suboptimal")
    if mol is None and moh is not None and s_mol.outcome != "timeout":
        found.append("mol_fails")
    if moh is None and mol is not None:
        found.append(("moh_fails", 0 if s_moh.outcome != "timeout" else 1))
    if moh is not None and mol is not None:
        score = fig1_score(inst, opt, moh, mol)
        if score is not None:
            found.append(("fig1", score))
    pp, s_pp = solve_pp(inst, time_limit=LIMIT)
    if pp is None and s_pp.message.startswith("no path for agent 2") and moh is not None and mol is not None:
        found.append("pp_fails")
    return found


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--tries", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--write", metavar="DIR")
    args = ap.parse_args()
    rng = random.Random(args.seed)
    best = {}
    for k in range(args.tries):
        inst = random_instance(rng)
        if inst is None:
            continue
        for name in classify(inst):
            score = 0
            if isinstance(name, tuple):
                name, score = name
            size = (score, inst.map.width * inst.map.height, len(inst.boxes))
            if name not in best or size < best[name][0]:
                best[name] = (size, inst)
                print(f"try {k}: {name}\n{format_map(inst.map, inst.boxes)}{inst.agents}\n", flush=True)
    if args.write:
        out = Path(args.write)
        out.mkdir(parents=True, exist_ok=True)
        for name, (_, inst) in sorted(best.items()):
            save_instance(inst, out / f"{name}.map", out / f"{name}.agents")
    print("found:", sorted(best))


if __name__ == "__main__":
    main()
