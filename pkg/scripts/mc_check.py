"""Run every preset in exact + Monte Carlo mode and print the largest |z| per preset."""

from __future__ import annotations

import argparse
import json

from paradox_lab.scenario import PRESETS, parse_scenario, run_scenario


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    status = 0
    for name in PRESETS:
        doc = {"scenario": name, "mode": "both", "trials": args.trials, "seed": args.seed}
        r = run_scenario(parse_scenario(json.dumps(doc)))
        bad = r.mc.hard_failures
        status |= bool(bad) or r.mc.max_abs_z > 4
        print(f"{name:16s} max|z| = {r.mc.max_abs_z:6.3f}  certain-event failures: {len(bad)}")
    return status


if __name__ == "__main__":
    raise SystemExit(main())
