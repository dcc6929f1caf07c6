#!/usr/bin/env python3
"""Run the full strategy verdict table and print it.

Equivalent to `embedsim table1`; kept as a script so the experiment is
runnable straight from a checkout.
"""

import argparse
import sys

from embedsim.table1 import run_table1


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--json", action="store_true")
    args = parser.parse_args()
    report = run_table1(seed=args.seed, jobs=args.jobs)
    sys.stdout.write(report.to_json() if args.json else report.to_markdown())
    return 0


if __name__ == "__main__":
    sys.exit(main())
