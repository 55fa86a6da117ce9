#!/usr/bin/env python3
"""Drive the bundled experiment scenarios through the CLI.

Each scenario in scripts/scenarios/ is validated and executed into
runs/<name>/.  Pass scenario names to run a subset; --threads parallelizes
sweep points inside each run.

    python3 scripts/run_experiments.py                # everything
    python3 scripts/run_experiments.py wkb_caustic    # one scenario
"""

import argparse
import json
import sys
import time
from pathlib import Path

from semiphase.cli import main as cli_main

SCENARIO_DIR = Path(__file__).resolve().parent / "scenarios"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("names", nargs="*", help="scenario names (default: all)")
    parser.add_argument("--out-root", default="runs", help="root directory for run outputs")
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    available = {p.stem: p for p in sorted(SCENARIO_DIR.glob("*.json"))}
    names = args.names or list(available)
    unknown = [n for n in names if n not in available]
    if unknown:
        print(f"unknown scenarios: {unknown}; available: {sorted(available)}", file=sys.stderr)
        return 2

    failures = []
    for name in names:
        path = available[name]
        out = Path(args.out_root) / json.loads(path.read_text())["name"]
        if (out / "run_manifest.json").exists():
            print(f"== {name}: {out} already complete, skipping")
            continue
        print(f"== {name} -> {out}")
        t0 = time.perf_counter()
        rc = cli_main([
            "run", "--scenario", str(path), "--out", str(out),
            "--threads", str(args.threads),
        ])
        print(f"   exit {rc} in {time.perf_counter() - t0:.1f}s")
        if rc != 0:
            failures.append(name)
    if failures:
        print(f"failed: {failures}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
