"""Command-line interface.

One subcommand per invocation:

* ``solve`` — run one algorithm on a network/request pair.
* ``oracle`` — exhaustive search (the reference optimum).
* ``gen`` — draw one random layered instance to files.
* ``experiment`` — run a seeded sweep from a config file to CSVs.
* ``certify`` — random-linear-coding achievability certificate for a
  placement.
* ``fixtures`` — write a named fixture network/request to files.

stdout carries only the result document; diagnostics go to stderr.
Exit codes: 0 success, 2 infeasible (or certificate not achieved),
1 input error (unreadable files, unknown nodes, missing parameters);
malformed flags get argparse's usual usage message.  All randomness
flows from explicit ``--seed`` flags; the CHAINCUT_THREADS environment
variable caps experiment worker threads.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path
from typing import Optional

from .analytic import CompleteGraphParams, tradeoff_rows
from .chain import ChainRequest, validate
from .coding import certify_placement
from .experiments import THREADS_ENV, ExperimentConfig, gen_layered_network, run_sweep
from .experiments import summarize, write_rows_csv, write_summary_csv
from .fixtures import complete_graph, example1, example2
from .netgraph import Network
from .serialize import (
    certificate_to_json,
    dump_json,
    load_json,
    network_from_json,
    network_to_json,
    placement_from_json,
    request_from_json,
    request_to_json,
    solve_result_to_json,
)
from .solvers import (
    SolveResult,
    solve_alpha_greedy,
    solve_alpha_optimal,
    solve_exhaustive,
    solve_greedy,
    solve_no_redundancy,
)

ALGORITHM_CHOICES = (
    "noredundancy",
    "greedy",
    "alpha-optimal",
    "alpha-greedy",
    "exhaustive",
)


def _emit(doc: dict, out: Optional[str]) -> None:
    print(json.dumps(doc, indent=2))
    if out:
        dump_json(doc, out)


def _load_pair(network_path: str, request_path: str) -> tuple[Network, ChainRequest]:
    net = network_from_json(load_json(network_path))
    req = request_from_json(load_json(request_path), net)
    report = validate(net, req)
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if report.errors:
        raise ValueError("; ".join(report.errors))
    return net, req


def _run_algorithm(
    name: str, alpha: Optional[int], net: Network, req: ChainRequest
) -> SolveResult:
    if name == "noredundancy":
        return solve_no_redundancy(net, req)
    if name == "greedy":
        return solve_greedy(net, req)
    if name == "exhaustive":
        return solve_exhaustive(net, req)
    if alpha is None:
        raise ValueError(f"--alpha is required for --algorithm {name}")
    if name == "alpha-optimal":
        return solve_alpha_optimal(net, req, alpha)
    if name == "alpha-greedy":
        return solve_alpha_greedy(net, req, alpha)
    raise ValueError(f"unknown algorithm {name!r}")


def _write_instance(net: Network, req: ChainRequest, out_dir: str) -> int:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    network_path = out / "network.json"
    request_path = out / "request.json"
    dump_json(network_to_json(net), network_path)
    dump_json(request_to_json(req, net), request_path)
    print(json.dumps({"network": str(network_path), "request": str(request_path)}))
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    net, req = _load_pair(args.network, args.request)
    result = _run_algorithm(args.algorithm, args.alpha, net, req)
    _emit(solve_result_to_json(result, net), args.out)
    return 2 if result.delay.is_infeasible else 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    net, req = _load_pair(args.network, args.request)
    result = solve_exhaustive(net, req)
    _emit(solve_result_to_json(result, net), args.out)
    return 2 if result.delay.is_infeasible else 0


def _cmd_gen(args: argparse.Namespace) -> int:
    net, req = gen_layered_network(args.n, args.k, args.p, args.u, args.seed)
    return _write_instance(net, req, args.out)


def _cmd_fixtures(args: argparse.Namespace) -> int:
    def require(**flags: Optional[object]) -> None:
        missing = [f"--{k}" for k, v in flags.items() if v is None]
        if missing:
            raise ValueError(
                f"fixture {args.name!r} needs {' '.join(missing)}"
            )

    if args.name == "example1":
        net, req = example1()
    elif args.name == "example2":
        require(n=args.n, k=args.k)
        net, req = example2(args.n, args.k)
    else:
        require(v=args.v, n=args.n, k=args.k, epsilon=args.epsilon)
        params = CompleteGraphParams.of(args.v, args.n, args.k, args.epsilon)
        net, req = complete_graph(args.v, args.n, args.k, args.epsilon)
        _write_tradeoff_csv(params, Path(args.out))
    return _write_instance(net, req, args.out)


def _write_tradeoff_csv(params: CompleteGraphParams, out: Path) -> None:
    """The closed-form delay/processing-cost trade-off table."""
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "tradeoff.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["alpha", "optimal_normalized", "noredundancy_normalized", "ratio"]
        )
        for row in tradeoff_rows(params):
            writer.writerow(
                [
                    row["alpha"],
                    f"{float(row['optimal_normalized']):.9g}",
                    f"{float(row['noredundancy_normalized']):.9g}",
                    f"{float(row['ratio']):.9g}",
                ]
            )


def _cmd_experiment(args: argparse.Namespace) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        config = ExperimentConfig.from_dict(json.load(fh))
    env_workers = os.environ.get(THREADS_ENV)
    rows = run_sweep(config, workers=int(env_workers) if env_workers else None)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows_path = out / "rows.csv"
    summary_path = out / "summary.csv"
    with open(rows_path, "w", encoding="utf-8", newline="") as fh:
        write_rows_csv(rows, fh)
    with open(summary_path, "w", encoding="utf-8", newline="") as fh:
        write_summary_csv(summarize(rows), fh)
    print(json.dumps({"rows": str(rows_path), "summary": str(summary_path)}))
    return 0


def _cmd_certify(args: argparse.Namespace) -> int:
    net, req = _load_pair(args.network, args.request)
    placement = placement_from_json(load_json(args.placement), net)
    cert = certify_placement(
        net, req, placement, seed=args.seed, retries=args.retries
    )
    _emit(certificate_to_json(cert, net), args.out)
    return 0 if cert.achieved else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaincut",
        description="Minimum-delay redundant placement for service chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_pair(p: argparse.ArgumentParser) -> None:
        p.add_argument("--network", required=True, help="network JSON file")
        p.add_argument("--request", required=True, help="request JSON file")

    p = sub.add_parser("solve", help="run one algorithm on an instance")
    add_pair(p)
    p.add_argument("--algorithm", required=True, choices=ALGORITHM_CHOICES)
    p.add_argument("--alpha", type=int, help="cap for the alpha-* algorithms")
    p.add_argument("--out", help="also write the result JSON here")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("oracle", help="exhaustive reference optimum")
    add_pair(p)
    p.add_argument("--out", help="also write the result JSON here")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("gen", help="draw one random layered instance")
    p.add_argument("--n", type=int, required=True, help="nodes per layer")
    p.add_argument("--k", type=int, required=True, help="number of layers")
    p.add_argument("--p", type=float, default=1.0, help="edge presence probability")
    p.add_argument("--u", type=float, default=0.5, help="capacity half-width")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("experiment", help="run a sweep from a config file")
    p.add_argument("--config", required=True, help="ExperimentConfig JSON file")
    p.add_argument("--out", required=True, help="output directory for CSVs")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("certify", help="coding achievability certificate")
    add_pair(p)
    p.add_argument("--placement", required=True, help="placement JSON file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--retries", type=int, default=8)
    p.add_argument("--out", help="also write the certificate JSON here")
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("fixtures", help="write a named fixture instance")
    p.add_argument(
        "--name", required=True, choices=("example1", "example2", "complete")
    )
    p.add_argument("--n", type=int, help="nodes per layer / candidate set size")
    p.add_argument("--k", type=int, help="number of stages")
    p.add_argument("--v", type=int, help="total nodes (complete fixture)")
    p.add_argument("--epsilon", help="small capacity (complete fixture)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_fixtures)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
