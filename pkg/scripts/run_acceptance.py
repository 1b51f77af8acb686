"""Run the acceptance suites and print one line per criterion."""

import argparse
import sys

from frobsplit.acceptance import AcceptanceConfig, run_all


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    cfg = AcceptanceConfig.quick(args.seed) if args.quick else AcceptanceConfig(seed=args.seed)
    results = run_all(cfg)
    for r in results:
        print(r.line())
    sys.exit(0 if all(r.passed for r in results) else 1)


if __name__ == "__main__":
    main()
