"""Command line entry point: ``hybridnet --scenario ref.scn --sweep distance``."""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .errors import ScenarioError, ValidationFailed
from .scenario import parse_scenario
from .sweep import Mode, SweepConfig, emit_csv, run_sweep

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hybridnet",
        description="Monte-Carlo throughput of V-band, E-band and hybrid mmWave HetNets.",
    )
    p.add_argument("--scenario", metavar="PATH", help="scenario file (defaults apply when omitted)")
    p.add_argument("--sweep", choices=("distance", "density"), default="distance")
    p.add_argument("--mode", choices=("v", "e", "hybrid", "all"), default="all")
    p.add_argument("--trials", type=int, help="trials per sweep point (overrides the scenario)")
    p.add_argument("--seed", type=int, help="master seed (overrides the scenario)")
    p.add_argument("--out", metavar="PATH", help="CSV destination (default: stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for trials")
    p.add_argument("--validate-only", action="store_true",
                   help="print the regulatory report and exit")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.scenario:
            with open(args.scenario, encoding="utf-8") as fh:
                text = fh.read()
        else:
            text = ""
        scenario = parse_scenario(text, validate=False)
    except ScenarioError as exc:
        print(f"{args.scenario or '<defaults>'}: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"cannot read {args.scenario}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO

    reports = scenario.validation_reports()
    failed = not all(r.ok for r in reports)
    for r in reports:
        for line in r.lines():
            if args.validate_only or not line.startswith("ok"):
                print(line, file=sys.stderr)
    if failed:
        try:
            parse_scenario(text)
        except ValidationFailed as exc:
            for loc in exc.locations:
                print(f"{args.scenario or '<defaults>'}: {loc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.validate_only:
        return EXIT_OK

    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    try:
        scenario = dataclasses.replace(scenario, **overrides) if overrides else scenario
    except ValueError as exc:
        print(f"invalid option: {exc}", file=sys.stderr)
        return EXIT_IO

    modes = Mode.parse(args.mode)
    sweep = (SweepConfig.distance if args.sweep == "distance" else SweepConfig.density)(scenario, modes)
    curves = run_sweep(scenario, sweep, jobs=max(1, args.jobs))
    try:
        emit_csv(curves, args.out)
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def run() -> None:
    sys.exit(main())
