#!/usr/bin/env python3
"""Run the full Monte Carlo oracle audit for a channel config and print a report.

Exit code 0 iff every check passes.  Equivalent to ``fadecap verify`` with
report output; sample sizes are CLI-adjustable for quick smoke runs.
"""

import argparse
from pathlib import Path

from fadecap import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=Path(__file__).resolve().parent.parent / "configs" / "demo.json")
    parser.add_argument("--samples-mi", type=int, default=100_000)
    parser.add_argument("--samples-moments", type=int, default=1_000_000)
    parser.add_argument("--output", default=None)
    args = parser.parse_args()

    argv = [
        "verify",
        "--config", str(args.config),
        "--samples-mi", str(args.samples_mi),
        "--samples-moments", str(args.samples_moments),
    ]
    if args.output:
        argv += ["--output", args.output]
    return cli.main(argv)


if __name__ == "__main__":
    raise SystemExit(main())
