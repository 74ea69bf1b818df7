#!/usr/bin/env python3
"""Recompute the rational-double-point height table and diff it against the
closed-form expectations.

The D-type families at p=2 are instantiated for 2 <= n <= n-bound and every
coindex 0 <= r <= n-1; the E-type rows cover p in {2,3,5}.  Exits nonzero if
any computed height disagrees, so the script doubles as a regression gate:

    python3 scripts/rdp_table.py --primes 2,3,5 --n-bound 8
"""

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

from qfsplit.cli import rdp_compute_row, rdp_rows


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--primes", default="2,3,5", help="subset of 2,3,5")
    ap.add_argument("--n-bound", type=int, default=8, help="largest D-family index")
    ap.add_argument("--workers", type=int, default=None, help="parallel processes")
    ap.add_argument("--csv", action="store_true", help="emit CSV instead of a table")
    args = ap.parse_args()

    p_set = sorted({int(v) for v in args.primes.split(",")})
    rows = rdp_rows(p_set, args.n_bound)
    if args.workers and args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            computed = list(pool.map(rdp_compute_row, rows))
    else:
        computed = [rdp_compute_row(r) for r in rows]

    if args.csv:
        print("p,type,f,expected,computed,match")
        for r in computed:
            print(f"{r['p']},{r['type']},{r['f']},{r['expected']},{r['computed']},{r['match']}")
    else:
        width = max(len(r["f"]) for r in computed)
        for r in computed:
            flag = "" if r["match"] else "   <-- MISMATCH"
            print(
                f"p={r['p']}  {r['type']:<7} {r['f']:<{width}}  "
                f"expected {r['expected']}  computed {r['computed']}{flag}"
            )

    bad = [r for r in computed if not r["match"]]
    print(f"\n{len(computed)} rows, {len(bad)} mismatches", file=sys.stderr)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
