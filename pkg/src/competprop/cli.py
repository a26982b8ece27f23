"""Command-line entry point ``competprop``.

Each subcommand runs one experiment kind from a JSON configuration::

    competprop compare --config fig3a.json --samples 20000 --out-dir out/fig3a

Exit codes: 0 on success, 2 for configuration errors, 3 when an iteration
fails to converge.
"""
from __future__ import annotations

import argparse
import sys

from .errors import CompetPropError, ConfigInvalidError, NotConvergedError
from .experiments import ExperimentConfig, run_experiment

SUBCOMMANDS = {
    "compare": "compare_mc_ncpm",
    "asymptotics": "asymptotics",
    "stability": "stability",
    "game": "game",
    "gen-graph": "gen_graph",
}

HELP = {
    "compare": "Monte Carlo estimate vs. mean-field trajectory, per (t, node, product)",
    "asymptotics": "predicted limit of the social-self model plus the iterated trajectory",
    "stability": "two-product self-social fixed point and its stability report",
    "game": "closed-loop play of the budget-allocation game",
    "gen-graph": "generate a social network and write it as JSON and an edge list",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="competprop", description="Competing-product propagation experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in HELP.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--config", required=True, help="JSON configuration file")
        p.add_argument("--seed", type=int, help="override the top-level seed")
        p.add_argument("--out-dir", dest="output_dir", help="override output_dir")
        p.add_argument("--samples", type=int, help="override the Monte Carlo sample count")
        p.add_argument("--horizon", type=int, help="override the number of steps")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        "experiment": SUBCOMMANDS[args.command],
        "seed": args.seed,
        "output_dir": args.output_dir,
        "samples": args.samples,
        "horizon": args.horizon,
    }
    try:
        cfg = ExperimentConfig.load(args.config, overrides)
        files = run_experiment(cfg)
    except ConfigInvalidError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NotConvergedError as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return 3
    except CompetPropError as exc:
        # invalid model inputs (disconnected graph, bad delta, ...) come from the config too
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
