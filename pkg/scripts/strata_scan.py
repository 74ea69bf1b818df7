#!/usr/bin/env python3
"""Tabulate the height distribution of the degree-N hypersurface family.

Builds the stratum polynomials b_1, ..., b_{h-1} for F_p[x_1..x_N] and then
either sweeps the whole coefficient space (feasible for p=2, N=3: 1023
nonzero members) or samples it, comparing the cheap stratum profile with the
exact height of each member:

    python3 scripts/strata_scan.py --p 2 --nvars 3 --h-max 4 --sweep
    python3 scripts/strata_scan.py --p 3 --nvars 3 --samples 500
"""

import argparse
import random
import sys
from collections import Counter
from itertools import product

from qfsplit import Grading
from qfsplit.criteria import FINITE, height_graded_cy
from qfsplit.strata import FamilyContext, is_smooth_at_rational_points, strata_polynomials


def classify(ctx, strata, values, n_max):
    g = ctx.specialize_generic(values)
    if g.is_zero():
        return None
    profile = strata.profile(values)
    res = height_graded_cy([g], Grading.standard(ctx.nvars), n_max=n_max)
    exact = res.n if res.verdict == FINITE else ">= %d" % (res.n or n_max)
    smooth = is_smooth_at_rational_points(g)
    return profile, exact, smooth


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--nvars", type=int, default=3, help="N (= degree)")
    ap.add_argument("--h-max", type=int, default=4, help="depth of the stratum table")
    ap.add_argument("--sweep", action="store_true", help="enumerate every member")
    ap.add_argument("--samples", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    ctx = FamilyContext.create(args.p, args.nvars)
    strata = strata_polynomials(ctx, args.h_max)
    print(
        f"family: degree {args.nvars} in {args.nvars} variables over F_{args.p}; "
        f"{len(ctx.monomials)} coefficients"
    )
    for i, b in enumerate(strata.polynomials, start=1):
        print(f"  b_{i}: {len(b.terms)} term(s), degree {args.p**i - 1}")

    if args.sweep:
        points = product(range(args.p), repeat=len(ctx.monomials))
    else:
        rng = random.Random(args.seed)
        points = (
            [rng.randrange(args.p) for _ in ctx.monomials] for _ in range(args.samples)
        )

    histogram = Counter()
    disagreements = 0
    seen = 0
    for values in points:
        outcome = classify(ctx, strata, list(values), args.h_max)
        if outcome is None:
            continue
        profile, exact, smooth = outcome
        seen += 1
        histogram[(profile, exact, smooth)] += 1
        if isinstance(exact, int) and exact < profile:
            disagreements += 1

    print(f"\n{seen} members  (profile, exact height, smooth-at-rational-points):")
    for key in sorted(histogram, key=str):
        print(f"  {key}: {histogram[key]}")
    if disagreements:
        print(f"\n{disagreements} members had exact height below their profile "
              "(should be impossible)", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
