"""Command-line front end: solve, oracle queries, solution verification,
and benchmark ratio tables.

Exit codes: 0 success, 1 verification failure, 2 invalid arguments,
3 solver error, 4 exact-oracle size guard. Identical command lines
(including the seed) produce byte-identical JSON on stdout; text tables
are presentation only and go to stderr.
"""

import argparse
import json
import logging
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Dict, List, Optional

from . import exact_oracles, latency_solvers, lp_toolkit
from .concat_graph import mu_star
from .exact_oracles import OracleGuardError
from .instance import (
    MetricInstance,
    RoutePlan,
    evaluate_plan,
    evaluate_plan_detail,
    parse_instance,
    time_horizon,
)
from .latency_solvers import SolverConfig, SolverError

log = logging.getLogger("mdkmlp.cli")

MU_TOL = Fraction(1, 10**9)

ALGORITHMS = (
    "multidepot",
    "kmlp-lp",
    "kmlp-comb",
    "mlp-lp",
    "lp2-round",
    "bnslb-construct",
)


def _frac(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from exc


def _frac_str(x) -> str:
    return str(Fraction(x))


def _read_instance(path: str) -> MetricInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())


def _dump_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def _run_algorithm(alg: str, inst: MetricInstance, cfg: SolverConfig):
    """Returns (plan, bounds) with whichever LP/oracle values the run computed."""
    if alg == "multidepot":
        plan = latency_solvers.solve_multidepot(inst, cfg)
        diag = latency_solvers.solve_multidepot.last_diagnostics
        return plan, {"lp1": float(diag["lp_objective"])}
    if alg == "kmlp-lp":
        plan = latency_solvers.solve_kmlp_lp(inst, cfg)
        diag = latency_solvers.solve_kmlp_lp.last_diagnostics
        return plan, {"lp3": float(diag["lp_objective"])}
    if alg == "kmlp-comb":
        return latency_solvers.solve_kmlp_combinatorial(inst, cfg), {}
    if alg == "mlp-lp":
        plan = latency_solvers.solve_mlp_lp(inst, cfg)
        diag = latency_solvers.solve_mlp_lp.last_diagnostics
        return plan, {"lp3": float(diag["lp_objective"])}
    if alg == "lp2-round":
        T = time_horizon(inst).T
        sol2 = lp_toolkit.build_and_solve_lp2(inst, T)
        plan = latency_solvers.round_lp2(inst, sol2, cfg)
        return plan, {"lp2": float(sol2.objective_value)}
    if alg == "bnslb-construct":
        table = exact_oracles.bnslb(inst)
        plan = latency_solvers.bnslb_construction(inst, table, cfg)
        return plan, {"bnslb": float(table.bnslb)}
    raise SolverError(f"unknown algorithm {alg!r}")


def cmd_solve(args) -> int:
    inst = _read_instance(args.input)
    cfg = SolverConfig(
        seed=args.seed,
        growth=args.growth,
        epsilon=args.epsilon,
        derandomize_directions=not args.no_derandomize,
    )
    plan, bounds = _run_algorithm(args.alg, inst, cfg)
    cost, per_node = evaluate_plan_detail(inst, plan)
    out = {
        "algorithm": args.alg,
        "seed": args.seed,
        "routes": [list(r) for r in plan.routes],
        "objective_variant": plan.objective_variant,
        "total_latency": float(cost),
        "total_latency_exact": _frac_str(cost),
        "per_node_latency": {str(v): float(l) for v, l in per_node.items()},
        "bounds": bounds,
    }
    text = _dump_json(out)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_oracle(args) -> int:
    inst = _read_instance(args.input)
    what = args.what
    out: Dict = {"what": what}
    if what == "opt":
        res = exact_oracles.exact_kmlp(inst)
        out["value"] = _frac_str(res.value)
        out["routes"] = [list(r) for r in res.witness.routes]
    elif what == "bnslb":
        table = exact_oracles.bnslb(inst)
        out["value"] = _frac_str(table.bnslb)
        out["table"] = [_frac_str(b) for b in table.values]
    elif what in ("lp1", "lp2", "lp3"):
        T = time_horizon(inst).T
        build = {
            "lp1": lp_toolkit.build_and_solve_lp1,
            "lp2": lp_toolkit.build_and_solve_lp2,
            "lp3": lp_toolkit.build_and_solve_lp3,
        }[what]
        sol = build(inst, T)
        out["value"] = _frac_str(sol.objective_value)
        out["T"] = T
        out["nonzeros"] = len(sol.values)
    elif what == "pc-paths":
        root = args.root if args.root is not None else inst.roots[0]
        pen = {v: args.penalty for v in inst.nodes if v != root}
        res = exact_oracles.exact_pc_paths(inst, root, pen)
        out["value"] = _frac_str(res.value)
        out["paths"] = [list(p) for p in res.witness]
    elif what == "orienteering":
        root = args.root if args.root is not None else inst.roots[0]
        if args.budget is None:
            raise SolverError("--budget is required for orienteering")
        rewards = {v: Fraction(1) for v in inst.nodes if v != root}
        res = exact_oracles.exact_orienteering(inst, root, args.budget, rewards)
        out["value"] = _frac_str(res.value)
        out["path"] = list(res.witness)
    else:  # pragma: no cover - argparse restricts choices
        raise SolverError(f"unknown oracle {what!r}")
    print(_dump_json(out))
    return 0


# per-run guarantee factors: algorithm -> (denominator oracle, factor)
_MU = mu_star(MU_TOL)
_VERIFY_BOUNDS = {
    ("kmlp-comb", "bnslb"): 2 * _MU,
    ("kmlp-lp", "lp3"): 2 * _MU,
    ("mlp-lp", "lp3"): _MU,
    ("bnslb-construct", "bnslb"): _MU,
}
_VERIFY_TOL = Fraction(1, 10**9)


def _oracle_value(inst: MetricInstance, which: str) -> Fraction:
    if which == "opt":
        return exact_oracles.exact_kmlp(inst).value
    if which == "bnslb":
        return exact_oracles.bnslb(inst).bnslb
    T = time_horizon(inst).T
    build = {
        "lp1": lp_toolkit.build_and_solve_lp1,
        "lp2": lp_toolkit.build_and_solve_lp2,
        "lp3": lp_toolkit.build_and_solve_lp3,
    }[which]
    return build(inst, T).objective_value


def cmd_verify(args) -> int:
    inst = _read_instance(args.input)
    with open(args.solution, "r", encoding="utf-8") as fh:
        sol = json.load(fh)
    routes = tuple(tuple(r) for r in sol["routes"])
    plan = RoutePlan(
        routes=routes, objective_variant=sol.get("objective_variant", "plain")
    )
    try:
        cost = evaluate_plan(inst, plan)
    except ValueError as exc:
        print(f"FAIL infeasible: {exc}", file=sys.stderr)
        return 1
    report: Dict = {"feasible": True, "cost": _frac_str(cost)}
    recorded = sol.get("total_latency_exact")
    if recorded is not None and Fraction(recorded) != cost:
        print(
            f"FAIL cost mismatch: recorded {recorded}, recomputed {cost}",
            file=sys.stderr,
        )
        return 1
    status = 0
    if args.against:
        denom = _oracle_value(inst, args.against)
        report["against"] = args.against
        report["denominator"] = _frac_str(denom)
        report["ratio"] = float(cost / denom) if denom else None
        bound = _VERIFY_BOUNDS.get((sol.get("algorithm"), args.against))
        if bound is not None:
            report["bound"] = float(bound)
            if cost > bound * denom * (1 + _VERIFY_TOL):
                print(
                    f"FAIL ratio {report['ratio']} exceeds bound {float(bound)}",
                    file=sys.stderr,
                )
                status = 1
    print(_dump_json(report))
    return status


# ---------------------------------------------------------------------------
# benchmark harness


def _metric_closure(n: int, rng: random.Random) -> List[List[int]]:
    cost = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            cost[i][j] = cost[j][i] = rng.randint(1, 10)
    for m in range(n):
        for i in range(n):
            for j in range(n):
                via = cost[i][m] + cost[m][j]
                if via < cost[i][j]:
                    cost[i][j] = via
    return cost


def _gen_instance(n: int, k: int, metric: str, rng: random.Random) -> MetricInstance:
    nodes = tuple(f"v{i}" for i in range(n))
    if metric == "random":
        cost = _metric_closure(n, rng)
    else:
        while True:
            if metric == "euclid-line":
                pts = [(rng.randint(0, 4 * n), 0) for _ in range(n)]
            else:
                pts = [
                    (rng.randint(0, 4 * n), rng.randint(0, 4 * n))
                    for _ in range(n)
                ]
            if len(set(pts)) == n:
                break
        cost = [
            [abs(p[0] - q[0]) + abs(p[1] - q[1]) for q in pts] for p in pts
        ]
    # all k vehicles share one depot so every algorithm applies
    return MetricInstance(
        nodes=nodes,
        roots=(nodes[0],) * k,
        cost=tuple(tuple(row) for row in cost),
    )


def _bench_row(idx: int, inst: MetricInstance, algs, seed: int) -> Dict:
    row: Dict = {"instance": idx}
    oracles: Dict[str, Optional[Fraction]] = {}
    try:
        oracles["opt"] = exact_oracles.exact_kmlp(inst).value
    except OracleGuardError:
        oracles["opt"] = None
    try:
        oracles["bnslb"] = exact_oracles.bnslb(inst).bnslb
    except OracleGuardError:
        oracles["bnslb"] = None
    T = time_horizon(inst).T
    oracles["lp1"] = lp_toolkit.build_and_solve_lp1(inst, T).objective_value
    oracles["lp2"] = lp_toolkit.build_and_solve_lp2(inst, T).objective_value
    oracles["lp3"] = lp_toolkit.build_and_solve_lp3(inst, T).objective_value
    for name, val in oracles.items():
        row[name] = _frac_str(val) if val is not None else None
    row["algs"] = {}
    cfg = SolverConfig(seed=seed)
    for alg in algs:
        try:
            plan, _ = _run_algorithm(alg, inst, cfg)
        except (SolverError, OracleGuardError) as exc:
            row["algs"][alg] = {"error": str(exc)}
            continue
        cost = evaluate_plan(inst, plan)
        entry: Dict = {"cost": _frac_str(cost)}
        ratios: Dict[str, Optional[float]] = {}
        for name, val in oracles.items():
            ratios[name] = float(cost / val) if val else None
        entry["ratios"] = ratios
        row["algs"][alg] = entry
    return row


def _bench_table(report: Dict) -> str:
    algs = report["algorithms"]
    header = ["inst", "opt", "bnslb", "lp1", "lp2", "lp3"] + list(algs)
    lines = ["  ".join(f"{h:>12}" for h in header)]
    for row in report["rows"]:
        cells = [str(row["instance"])]
        for name in ("opt", "bnslb", "lp1", "lp2", "lp3"):
            cells.append(row[name] if row[name] is not None else "-")
        for alg in algs:
            got = row["algs"].get(alg, {})
            cells.append(got.get("cost", got.get("error", "-")))
        lines.append("  ".join(f"{c:>12}" for c in cells))
    return "\n".join(lines)


def cmd_bench(args) -> int:
    if args.n < 1 or args.k < 1 or args.trials < 0:
        raise SolverError("invalid generator parameters")
    algs = (
        [a.strip() for a in args.algs.split(",") if a.strip()]
        if args.algs
        else ["multidepot", "kmlp-comb", "kmlp-lp", "bnslb-construct"]
        + (["mlp-lp"] if args.k == 1 else [])
    )
    for alg in algs:
        if alg not in ALGORITHMS:
            raise SolverError(f"unknown algorithm {alg!r}")
    rng = random.Random(args.seed)
    instances = [
        _gen_instance(args.n, args.k, args.metric, rng)
        for _ in range(args.trials)
    ]
    rows: List[Dict]
    if instances:
        with ThreadPoolExecutor(max_workers=min(4, len(instances))) as pool:
            rows = list(
                pool.map(
                    lambda it: _bench_row(it[0], it[1], algs, args.seed),
                    enumerate(instances),
                )
            )
    else:
        rows = []
    aggregate: Dict = {}
    for alg in algs:
        for name in ("opt", "bnslb", "lp1", "lp2", "lp3"):
            vals = [
                row["algs"][alg]["ratios"][name]
                for row in rows
                if "ratios" in row["algs"].get(alg, {})
                and row["algs"][alg]["ratios"][name] is not None
            ]
            if vals:
                aggregate.setdefault(alg, {})[name] = {
                    "mean": sum(vals) / len(vals),
                    "max": max(vals),
                }
    report = {
        "n": args.n,
        "k": args.k,
        "metric": args.metric,
        "seed": args.seed,
        "algorithms": algs,
        "rows": rows,
        "aggregate": aggregate,
    }
    print(_bench_table(report), file=sys.stderr)
    print(_dump_json(report))
    return 0


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdkmlp",
        description="Multi-depot minimum-latency solvers, oracles, and benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run a solver on an instance file")
    p.add_argument("--alg", required=True, choices=ALGORITHMS)
    p.add_argument("--input", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=_frac, default=Fraction(1, 100))
    p.add_argument("--growth", type=_frac, default=None)
    p.add_argument("--no-derandomize", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="query an exact oracle or LP value")
    p.add_argument(
        "--what",
        required=True,
        choices=("opt", "bnslb", "lp1", "lp2", "lp3", "pc-paths", "orienteering"),
    )
    p.add_argument("--input", required=True)
    p.add_argument("--root", default=None)
    p.add_argument("--penalty", type=_frac, default=Fraction(0))
    p.add_argument("--budget", type=_frac, default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="re-check a solution file")
    p.add_argument("--input", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument(
        "--against", choices=("opt", "bnslb", "lp1", "lp2", "lp3"), default=None
    )
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="random-instance benchmark ratio table")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--metric",
        choices=("random", "euclid-line", "euclid-plane"),
        default="euclid-plane",
    )
    p.add_argument("--algs", default=None)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    level = os.environ.get("MLP_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OracleGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (SolverError, lp_toolkit.LpError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
