#!/usr/bin/env python3
"""Reproduce the panel-size experiment: bounds vs elements per panel side.

Writes results/ris_size.csv with one row per (side length, phase mode, seed).
"""

import argparse
import pathlib
import sys

from risbound.cli import main as cli_main


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default=None)
    parser.add_argument("--out", default="results/ris_size.csv")
    parser.add_argument("--sizes", default="4,8,12,16")
    parser.add_argument("--seeds", default="1,2,3")
    parser.add_argument("--fim", default="paper", choices=["paper", "efim"])
    parser.add_argument("--full", action="store_true",
                        help="swarm 64 / 300 iterations instead of 32 / 120")
    args = parser.parse_args(argv)

    pathlib.Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    cli_args = [
        "sweep-ris-size",
        "--sizes", args.sizes,
        "--phases", "random,aligned,pso",
        "--seeds", args.seeds,
        "--fim", args.fim,
        "--out", args.out,
        "--pso-swarm", "64" if args.full else "32",
        "--pso-iters", "300" if args.full else "120",
    ]
    if args.scenario:
        cli_args += ["--scenario", args.scenario]
    return cli_main(cli_args)


if __name__ == "__main__":
    sys.exit(run())
