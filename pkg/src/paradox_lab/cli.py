"""Command line entry point: ``paradox-lab run <scenario.json|preset> [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import EngineError, ParseError, ValidationError
from .report import render
from .scenario import DEFAULT_TRIALS, PRESETS, default_seed, run_scenario, scenario_from_dict

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_ENGINE = 3
EXIT_MC_FAILURE = 4


def _load_document(target: str) -> dict:
    if target in PRESETS:
        return {"scenario": target}
    path = Path(target)
    if not path.exists():
        raise ValidationError(f"{target!r} is neither a preset ({', '.join(PRESETS)}) nor a file")
    try:
        doc = json.loads(path.read_bytes().decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"{target}: not a UTF-8 JSON document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("scenario must be a JSON object")
    return doc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paradox-lab",
        description="Exact and Monte Carlo runs of three-box style pre/post-selection experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file or a built-in preset")
    run.add_argument("target", help="path to a scenario JSON file, or a preset name")
    run.add_argument("--mode", choices=["exact", "mc", "montecarlo", "both"])
    run.add_argument("--trials", type=int, help=f"Monte Carlo runs (default {DEFAULT_TRIALS})")
    run.add_argument("--seed", type=int, help="RNG seed (default $PARADOX_LAB_SEED or 0)")
    run.add_argument("--format", choices=["table", "json"], default="table")
    run.add_argument("--out", type=Path, help="write the report here instead of stdout")

    sub.add_parser("presets", help="list built-in presets")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "presets":
        for name, preset in PRESETS.items():
            print(f"{name:16s} {preset['engine']:8s} {preset['anchor']}")
        return EXIT_OK

    try:
        doc = _load_document(args.target)
        for key in ("mode", "trials", "seed"):
            value = getattr(args, key)
            if value is not None:
                doc[key] = value
        scenario = scenario_from_dict(doc, default_seed())
    except (ParseError, ValidationError) as exc:
        print(f"paradox-lab: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    try:
        report = run_scenario(scenario)
    except EngineError as exc:
        print(f"paradox-lab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ENGINE

    text = render(report, args.format)
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)

    if report.mc is not None and report.mc.hard_failures:
        print(
            f"paradox-lab: Monte Carlo contradicts a certain event: {report.mc.hard_failures}",
            file=sys.stderr,
        )
        return EXIT_MC_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
