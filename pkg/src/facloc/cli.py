"""Command-line harness: instance generation, solver and baseline runs,
standalone ruling-set runs, benchmark sweeps, and the acceptance suite."""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import acceptance
from .baselines import InstanceTooLarge, brute_force_opt, mettu_plaxton
from .generators import GeneratorSpec, InvalidSpec, generate
from .graphs import edge_count, gnp_adjacency, read_graph
from .metric import InstanceError, read_instance, total_cost, write_instance
from .ruling_set import run_two_ruling_set, verify_ruling_set
from .simulator import SimulationError
from .solver import radii_profile, solve


def _write_json(data: dict, path: str | None) -> None:
    text = json.dumps(data, indent=2)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_gen(args) -> int:
    spec = GeneratorSpec(
        kind=args.kind,
        n=args.n,
        dim=args.dim,
        cost_range=(args.cost_low, args.cost_high),
        seed=args.seed,
    )
    inst = generate(spec)
    write_instance(inst, args.output)
    print(f"wrote {args.kind} instance with n={inst.n} to {args.output}")
    return 0


def _cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    result = solve(inst, seed=args.seed)
    _write_json(result.to_dict(), args.output)
    return 0


def _cmd_baseline(args) -> int:
    inst = read_instance(args.instance)
    if not (args.mp or args.opt):
        args.mp = args.opt = True
    out: dict = {}
    if args.mp:
        config = mettu_plaxton(inst)
        out["mp"] = {"open": list(config.open), "cost": total_cost(inst, config)}
    if args.opt:
        opt = brute_force_opt(inst, limit=args.limit)
        out["opt"] = {
            "open": list(opt.config.open),
            "cost": opt.cost,
            "enumerated": opt.enumerated,
        }
    _write_json(out, args.output)
    return 0


def _cmd_ruling_set(args) -> int:
    if args.graph:
        adj = read_graph(args.graph)
    else:
        adj = gnp_adjacency(args.n, args.p, args.graph_seed)
    run_result, _ = run_two_ruling_set(adj, seed=args.seed)
    check = verify_ruling_set(adj, run_result.result, 2)
    out = run_result.to_dict()
    out["verified"] = check.accepted
    out["edges"] = edge_count(adj)
    _write_json(out, args.output)
    return 0 if check.accepted else 1


def _cmd_bench(args) -> int:
    sizes = [int(s) for s in args.n.split(",")]
    rows = []
    for n in sizes:
        for seed in range(args.seeds):
            inst = generate(GeneratorSpec(kind=args.kind, n=n, seed=seed,
                                          cost_range=(args.cost_low, args.cost_high)))
            result = solve(inst, seed=seed)
            sum_rbar = float(result.radii.rbar.sum())
            row = {
                "n": n,
                "seed": seed,
                "rounds": result.rounds,
                "rs_iterations": result.ruling.iterations,
                "cost": result.cost,
                "sum_rbar": sum_rbar,
                "cost_over_sum_rbar": result.cost / sum_rbar,
                "mp_cost": total_cost(inst, mettu_plaxton(inst)),
                "opt_cost": "",
            }
            if n <= args.opt_limit:
                row["opt_cost"] = brute_force_opt(inst, limit=args.opt_limit).cost
            rows.append(row)
    fields = ["n", "seed", "rounds", "rs_iterations", "cost", "sum_rbar",
              "cost_over_sum_rbar", "mp_cost", "opt_cost"]
    with open(args.output, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {args.output}")
    return 0


def _cmd_accept(args) -> int:
    numbers = None
    if args.criteria:
        numbers = [int(c) for c in args.criteria.split(",")]
    results = acceptance.run_acceptance(numbers=numbers)
    return 0 if all(r.passed for r in results) else 1


def _cmd_radii(args) -> int:
    inst = read_instance(args.instance)
    profile = radii_profile(inst)
    _write_json(
        {
            "r": profile.r.tolist(),
            "rbar": profile.rbar.tolist(),
            "r0": profile.r0,
            "class_of": profile.class_of.tolist(),
        },
        args.output,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="facloc")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("--kind", default="euclidean",
                   choices=["euclidean", "graph-metric", "figure2", "uniform-f"])
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--cost-low", type=float, default=0.5)
    p.add_argument("--cost-high", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("solve", help="run the distributed solver on an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("baseline", help="run the greedy baseline and/or exact optimum")
    p.add_argument("--instance", required=True)
    p.add_argument("--mp", action="store_true")
    p.add_argument("--opt", action="store_true")
    p.add_argument("--limit", type=int, default=16)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("ruling-set", help="run the 2-ruling set on a spanning subgraph")
    p.add_argument("--graph", help="graph JSON file {n, edges}")
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--graph-seed", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_ruling_set)

    p = sub.add_parser("bench", help="sweep n x seeds and write a CSV")
    p.add_argument("--n", required=True, help="comma-separated sizes")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--kind", default="euclidean")
    p.add_argument("--cost-low", type=float, default=0.5)
    p.add_argument("--cost-high", type=float, default=2.0)
    p.add_argument("--opt-limit", type=int, default=16)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("radii", help="report radii and classes of an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_radii)

    p = sub.add_parser("accept", help="run the acceptance suite")
    p.add_argument("--criteria", help="comma-separated criterion numbers (default: all)")
    p.set_defaults(func=_cmd_accept)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, InvalidSpec, InstanceTooLarge, SimulationError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
