"""Fraction of random smooth plane cubics that are supersingular, per prime.

Each curve is classified twice: by the coefficient criterion and by counting
points. Disagreements are reported and should never occur.
"""

import argparse
import random

from frobsplit.acceptance import random_smooth_cubic
from frobsplit.fpoly import PolyRing
from frobsplit.splitting import cy_coefficient_criterion, trace_of_frobenius


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--primes", default="2,3,5,7,11")
    args = parser.parse_args()
    rng = random.Random(args.seed)
    for p in (int(s) for s in args.primes.split(",")):
        ring = PolyRing(p, ("x", "y", "z"))
        ss = disagree = 0
        for _ in range(args.samples):
            f = random_smooth_cubic(ring, rng)
            by_count = trace_of_frobenius(f) % p == 0
            ss += by_count
            disagree += by_count != (cy_coefficient_criterion(f) == 0)
        print(f"p={p:<3} supersingular {ss:>3}/{args.samples}  disagreements {disagree}")


if __name__ == "__main__":
    main()
