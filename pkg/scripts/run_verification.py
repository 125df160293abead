#!/usr/bin/env python3
"""Run the seeded property-verification suite and write a JSON report.

Examples:
    python3 scripts/run_verification.py --seed 7 --trials 100 -o report.json
    python3 scripts/run_verification.py --inject-failure   # negative control
"""

import argparse
import sys

from slantmodel.verify import SuiteConfig, run_suite


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument(
        "--inject-failure",
        action="store_true",
        help="add a deliberately broken property; the suite must then fail",
    )
    parser.add_argument("-o", "--output", default=None, help="write JSON report here")
    args = parser.parse_args(argv)

    report = run_suite(
        SuiteConfig(seed=args.seed, trials=args.trials, inject_failure=args.inject_failure)
    )
    print(report.to_text())
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(report.to_json_text() + "\n")
        print(f"\nJSON report written to {args.output}")
    return 0 if report.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
