"""Command-line front end: sampling, expander extraction, Hamilton cycle
search, deletion attacks, experiment farms, and certificate verification.
"""

from __future__ import annotations

import argparse
import json
import sys

from .adversary import (
    AdversaryDeletion,
    maxcut_eps_adversary,
    random_bounded_adversary,
    unbalanced_cut_attack,
)
from .config_model import (
    DegreeSequence,
    PointSet,
    RejectionBudgetExceeded,
    project,
    sample_simple_with_remainder,
)
from .expander import ExpansionParams, build_sparse_expander, check_three_expander
from .experiments import (
    ConfigError,
    load_config,
    run_experiment,
    verify_results,
    write_outputs,
)
from .graphs import Graph, read_edgelist, write_edgelist
from .hamiltonicity import (
    booster_iteration,
    exact_hamiltonian,
    rotation_extension_solver,
)


def _cmd_sample(args) -> int:
    contains = None
    if args.contains:
        contains = read_edgelist(args.contains)
        if not isinstance(contains, Graph):
            print("error: --contains must be a simple graph file", file=sys.stderr)
            return 2
    n = args.n if contains is None else contains.n
    try:
        if args.algo == "seq":
            base = contains if contains is not None else Graph(n)
            result = sample_simple_with_remainder(
                base, args.d, args.seed, max_rejects=args.max_rejects
            )
            graph, rejections = result.graph, result.rejections
        else:
            if contains is not None:
                print("error: --contains supports --algo seq only", file=sys.stderr)
                return 2
            rejections = 0
            from .config_model import hybrid_sample_configuration
            from .rng import make_rng

            ps = PointSet(DegreeSequence.regular(n, args.d))
            rng = make_rng(args.seed)
            while True:
                mg = project(hybrid_sample_configuration(ps, args.switch_frac, rng))
                if mg.is_simple():
                    graph = mg.to_graph()
                    break
                rejections += 1
                if rejections > args.max_rejects:
                    raise RejectionBudgetExceeded("budget exhausted", rejections)
    except (ValueError, RejectionBudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_edgelist(graph, args.out)
    stats = {"rejections": rejections, "accept_rate": 1.0 / (rejections + 1)}
    with open(args.out + ".stats.json", "w") as fh:
        json.dump(stats, fh, sort_keys=True)
        fh.write("\n")
    print(json.dumps(stats, sort_keys=True))
    return 0


def _cmd_expander(args) -> int:
    g = read_edgelist(args.infile)
    params = ExpansionParams(
        ratio=args.ratio, fraction=args.fraction, mode=args.mode, budget=args.budget
    )
    if args.delta is not None:
        result = build_sparse_expander(
            g, args.delta, args.d, params, max_attempts=args.attempts, seed=args.seed
        )
        payload = {
            "ok": result.ok,
            "attempts": result.attempts,
            "rejections": result.rejections,
            "failure_stage": result.failure_stage,
        }
        if result.ok:
            payload["edges"] = result.graph.m
            payload["max_degree"] = result.graph.max_degree()
            payload["verdict"] = {
                "status": result.verdict.status,
                "sets_tested": result.verdict.sets_tested,
            }
            if args.out:
                write_edgelist(result.graph, args.out)
        print(json.dumps(payload, sort_keys=True))
        return 0 if result.ok else 1
    verdict = check_three_expander(g, params, seed=args.seed)
    payload = {
        "status": verdict.status,
        "sets_tested": verdict.sets_tested,
        "connectivity_failure": verdict.connectivity_failure,
        "witness": sorted(verdict.witness) if verdict.witness is not None else None,
    }
    print(json.dumps(payload, sort_keys=True))
    return 0 if verdict.ok else 1


def _cmd_ham(args) -> int:
    g = read_edgelist(args.infile)
    if args.method == "exact":
        try:
            answer = exact_hamiltonian(g)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(json.dumps({"hamiltonian": answer}))
        return 0
    if args.method == "rotation":
        result = rotation_extension_solver(g, budget=args.budget, seed=args.seed)
        if result.ok:
            print(json.dumps({"hamiltonian": True, "cycle": list(result.cycle)}))
            return 0
        print(
            json.dumps(
                {
                    "hamiltonian": False,
                    "failure": {
                        "best_path_length": result.best_path_length,
                        "rotations_used": result.rotations_used,
                        "restarts": result.restarts,
                    },
                },
                sort_keys=True,
            )
        )
        return 1
    run = booster_iteration(g, args.delta, args.d, seed=args.seed)
    if run.ok:
        print(json.dumps({"hamiltonian": True, "cycle": list(run.cycle)}))
        return 0
    print(
        json.dumps(
            {
                "hamiltonian": False,
                "failure": {
                    "stage": run.failure_stage,
                    "iterations": run.iterations,
                    "diagnostics": {
                        k: v
                        for k, v in run.diagnostics.items()
                        if isinstance(v, (int, float, str, list))
                    },
                },
            },
            sort_keys=True,
        )
    )
    return 1


def _cmd_attack(args) -> int:
    g = read_edgelist(args.infile)
    if args.kind == "random":
        if args.r is None:
            print("error: --kind random needs --r", file=sys.stderr)
            return 2
        result = random_bounded_adversary(g, args.r, args.seed)
    elif args.kind == "maxcut":
        if args.eps is None:
            print("error: --kind maxcut needs --eps", file=sys.stderr)
            return 2
        result = maxcut_eps_adversary(g, args.eps, args.seed)
    else:
        result = unbalanced_cut_attack(g, restarts=args.restarts, seed=args.seed)
    if not isinstance(result, AdversaryDeletion):
        print(json.dumps({"found": False, "stats": result.stats}, sort_keys=True))
        return 1
    if args.out:
        write_edgelist(result.h, args.out)
    certificate = None
    if result.certificate is not None:
        certificate = {
            "kind": "unbalanced_bipartite",
            "part_a": sorted(result.certificate.a),
            "part_b": sorted(result.certificate.b),
        }
    payload = {
        "found": True,
        "bound": result.bound,
        "deleted_edges": [[u, v] for u, v in result.h.edges()],
        "certificate": certificate,
    }
    print(json.dumps(payload, sort_keys=True))
    return 0


def _cmd_experiment(args) -> int:
    try:
        cfg = load_config(args.config)
        records, summary = run_experiment(cfg, workers=args.workers)
        write_outputs(cfg, records, summary)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps({"records": len(records), "summary": summary}, sort_keys=True))
    return 0


def _cmd_verify(args) -> int:
    try:
        cfg = load_config(args.config)
        report = verify_results(cfg, args.csv or cfg.out_csv)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(report, sort_keys=True))
    return 0 if report["ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regres",
        description="Random regular graphs, deletion adversaries, and "
        "Hamilton cycle search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a regular graph, exactly uniform")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--contains", help="edge list the sample must contain")
    p.add_argument("--algo", choices=["seq", "hybrid"], default="seq")
    p.add_argument("--switch-frac", type=float, default=2 / 3, dest="switch_frac")
    p.add_argument("--max-rejects", type=int, default=10**6, dest="max_rejects")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("expander", help="check expansion or extract a sparse expander")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--delta", type=float, default=None, help="run the extraction pipeline")
    p.add_argument("--d", type=int, default=0, help="ambient degree for the pipeline")
    p.add_argument("--mode", choices=["exact", "randomized"], default="exact")
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--ratio", type=float, default=3.0)
    p.add_argument("--fraction", type=float, default=1 / 400)
    p.add_argument("--attempts", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", help="write the extracted subgraph here")
    p.set_defaults(func=_cmd_expander)

    p = sub.add_parser("ham", help="search for a Hamilton cycle")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument(
        "--method", choices=["boosters", "rotation", "exact"], default="rotation"
    )
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--d", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=_cmd_ham)

    p = sub.add_parser("attack", help="bounded-degree deletion adversaries")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument(
        "--kind", choices=["random", "maxcut", "unbalanced"], required=True
    )
    p.add_argument("--r", type=int, default=None, help="degree cap for --kind random")
    p.add_argument("--eps", type=float, default=None, help="margin for --kind maxcut")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", help="write the deleted subgraph here")
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("experiment", help="run a seeded experiment farm")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("verify", help="re-validate certificates in a result file")
    p.add_argument("--config", required=True)
    p.add_argument("--csv", default=None, help="result file (default: config out_csv)")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
