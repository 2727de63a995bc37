#!/usr/bin/env python3
"""Brute-force check of the valuation predictors and the power-sum
congruences; mismatches (if any) go to a TSV file."""
import argparse
import os
import sys
import time

from powersum.valuation import verify_congruence_lemmas, verify_valuation_lemmas, write_records


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x-max", type=int, default=2000)
    ap.add_argument("--k-max", type=int, default=13)
    ap.add_argument("--records", default="results/valuation_mismatches.tsv")
    ap.add_argument("--literal", action="store_true",
                    help="also check the congruences in their commonly quoted (incorrect) form")
    args = ap.parse_args()

    t0 = time.perf_counter()
    mismatches, hits = verify_valuation_lemmas(args.x_max, args.k_max)
    for label, count in sorted(hits.items()):
        print(f"{count:>8}  {label}")
    for p, d in ((3, 3), (5, 2), (7, 2)):
        mismatches += verify_congruence_lemmas(p, d_max=d, q_max=3, k_max=args.k_max, m_max=300)
    if args.literal:
        lit = verify_congruence_lemmas(3, d_max=2, q_max=2, k_max=args.k_max, m_max=100, literal=True)
        print(f"literal form: {len(lit)} counterexamples, e.g. {lit[:3]}")
    if mismatches:
        os.makedirs(os.path.dirname(args.records) or ".", exist_ok=True)
        with open(args.records, "w") as fp:
            write_records(mismatches, fp)
        print(f"{len(mismatches)} mismatches written to {args.records}")
    print(f"done in {time.perf_counter() - t0:.1f}s, {len(mismatches)} mismatches")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
