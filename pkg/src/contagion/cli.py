"""Command-line entry points for the contagion toolkit.

Four subcommands: ``generate`` writes a network edge list, ``fit``
estimates a discrete power-law tail from a degree file, ``shock`` clears a
single-bank default on a stored network, and ``sweep`` runs an experiment
(or size/capital sweeps) from a JSON spec file. Progress goes to stderr;
results go to files or to stdout as single JSON records, so output can be
piped. The ``CONTAGION_WORKERS`` environment variable overrides the worker
count used by ``sweep``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import balance, clearing, harness, netgen, powerlaw

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contagion",
        description="Interbank-network contagion simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a directed scale-free network")
    gen.add_argument("--alpha", type=float, required=True)
    gen.add_argument("--beta", type=float, required=True)
    gen.add_argument("--gamma", type=float, required=True)
    gen.add_argument("--delta-in", type=float, required=True, dest="delta_in")
    gen.add_argument("--delta-out", type=float, required=True, dest="delta_out")
    gen.add_argument("--nodes", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", type=Path, required=True, help="edge-list path")

    fit = sub.add_parser("fit", help="fit a discrete power-law tail")
    fit.add_argument(
        "--input", type=Path, required=True, help="file with one integer per line"
    )

    shock = sub.add_parser("shock", help="clear a single-bank default")
    shock.add_argument("--edges", type=Path, required=True, help="edge-list path")
    shock.add_argument("--bank", type=int, required=True, help="bank to shock")
    shock.add_argument("--lambda-min", type=float, default=0.05, dest="lambda_min")
    shock.add_argument("--sigma", type=float, default=0.01)
    shock.add_argument("--xi", type=float, default=2.0)
    shock.add_argument("--seed", type=int, default=0, help="balance-sheet seed")
    shock.add_argument(
        "--recovery", type=float, default=0.0,
        help="surviving fraction of the shocked bank's nonbank assets",
    )
    shock.add_argument(
        "--trace", type=Path, default=None,
        help="write per-round JSON lines of the cascade to this path",
    )

    sweep = sub.add_parser("sweep", help="run an experiment from a JSON spec")
    sweep.add_argument(
        "--spec", type=Path, required=True,
        help="JSON file with ExperimentSpec fields",
    )
    sweep.add_argument("--out", type=Path, required=True, help="run directory")
    sweep.add_argument("--workers", type=int, default=None)
    sweep.add_argument(
        "--sizes", type=int, nargs="+", default=None,
        help="also run a size sweep over these node counts",
    )
    sweep.add_argument(
        "--lambdas", type=float, nargs="+", default=None,
        help="also run a capital sweep over these floors",
    )
    return parser


def _cmd_generate(args: argparse.Namespace) -> int:
    params = netgen.GenParams(
        alpha=args.alpha,
        beta=args.beta,
        gamma=args.gamma,
        delta_in=args.delta_in,
        delta_out=args.delta_out,
        n_target=args.nodes,
        seed=args.seed,
    )
    graph = netgen.generate(params)
    netgen.write_edge_list(graph, args.out, args.seed)
    print(
        f"[contagion] wrote {graph.link_count} links over {graph.n} nodes "
        f"to {args.out}",
        file=sys.stderr,
    )
    return 0


def _cmd_fit(args: argparse.Namespace) -> int:
    samples = []
    with open(args.input, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                samples.append(int(line))
    fit = powerlaw.fit_discrete(samples)
    print(
        json.dumps(
            {
                "exponent": fit.exponent,
                "x_min": fit.x_min,
                "ks": fit.ks_distance,
                "n_tail": fit.n_tail,
            }
        )
    )
    return 0


def _cmd_shock(args: argparse.Namespace) -> int:
    graph = netgen.read_edge_list(args.edges)
    exposures = balance.build_exposures(graph)
    sheets = balance.build_balance_sheets(
        exposures,
        balance.BalanceConfig(
            lambda_min=args.lambda_min, sigma=args.sigma, xi=args.xi, seed=args.seed
        ),
    )
    scenario = clearing.ShockScenario(args.bank, recovery_on_nonbank=args.recovery)
    if args.trace is not None:
        with open(args.trace, "w", encoding="ascii") as sink:
            solution = clearing.clear(exposures, sheets, scenario, trace=sink)
    else:
        solution = clearing.clear(exposures, sheets, scenario)
    a0 = clearing.total_initial_assets(sheets)
    result = clearing.cascade_metrics(solution, sheets, args.bank, a0)
    print(
        json.dumps(
            {
                "bank": result.shocked_bank,
                "di": result.di,
                "ti": result.ti,
                "dc": result.dc,
                "defaulted": sorted(result.defaulted),
                "iterations": solution.iterations,
            }
        )
    )
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    spec = harness.ExperimentSpec.from_json(args.spec)
    report = harness.run_experiment(spec, workers=args.workers)
    harness.write_run_directory(report, args.out)
    print(f"[contagion] run directory: {args.out}", file=sys.stderr)

    def _write_sweep(result: harness.SweepResult, path: Path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(
                f"{result.parameter},di_mean,di_std,dc_mean,dc_std,"
                "di_max_mean,dc_max_mean,flag\n"
            )
            for row in result.rows:
                fh.write(
                    f"{row.value:.12g},{row.di_mean:.12g},{row.di_std:.12g},"
                    f"{row.dc_mean:.12g},{row.dc_std:.12g},"
                    f"{row.di_max_mean:.12g},{row.dc_max_mean:.12g},{row.flag}\n"
                )

    if args.sizes:
        result = harness.size_sweep(spec, args.sizes, workers=args.workers)
        _write_sweep(result, Path(args.out) / "size_sweep.csv")
        print("[contagion] size sweep done", file=sys.stderr)
    if args.lambdas:
        result = harness.capital_sweep(spec, args.lambdas, workers=args.workers)
        _write_sweep(result, Path(args.out) / "capital_sweep.csv")
        print("[contagion] capital sweep done", file=sys.stderr)
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "fit": _cmd_fit,
    "shock": _cmd_shock,
    "sweep": _cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
