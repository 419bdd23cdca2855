#!/usr/bin/env python3
"""Run acceptance criteria 1-10 and write one canonical JSON artifact per criterion.

Usage: python3 scripts/run_acceptance.py [--out artifacts] [--seed 0]
"""

import argparse
import pathlib
import sys

from vdcsets.experiments import CRITERIA, TIME_LIMITS, criterion_10, run_criterion
from vdcsets.serialize import dumps, write_json


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="artifacts")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    first, failed = {}, []
    for i in CRITERIA:
        artifact, elapsed = run_criterion(i, args.seed)
        first[i] = dumps(artifact)
        write_json(out / f"criterion_{i}.json", artifact)
        ok = artifact["passed"] and elapsed < TIME_LIMITS[i]
        failed += [] if ok else [i]
        print(f"criterion {i:>2}: {'PASS' if ok else 'FAIL'}  {elapsed:.2f}s (limit {TIME_LIMITS[i]}s)")
    det = criterion_10(args.seed, first)
    write_json(out / "criterion_10.json", det)
    failed += [] if det["passed"] else [10]
    print(f"criterion 10: {'PASS' if det['passed'] else 'FAIL'}  rerun byte-identical")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
