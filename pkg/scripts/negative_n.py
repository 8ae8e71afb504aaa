#!/usr/bin/env python3
"""Compare the surgeries 1/n and -1/n: class counts, Casson values, sigma.

    python3 scripts/negative_n.py --n-max 4

Only sigma_{-1} = sigma_1 is an established identity; for larger n the
comparison is reported as found.
"""
from __future__ import annotations

import argparse

from fig8torsion.report import format_sigma_exact, run_pipeline


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n-max", type=int, default=3)
    args = ap.parse_args()
    print("| n | classes(n) | classes(-n) | lambda(-n) | lambda_SL2C(-n) | formula consistent(-n) | sigma_n == sigma_-n |")
    print("|--:|--:|--:|--:|--:|:-:|:-:|")
    for n in range(1, args.n_max + 1):
        pos, neg = run_pipeline(n), run_pipeline(-n)
        same = pos.sigma.rounded_coeffs == neg.sigma.rounded_coeffs
        c = neg.casson
        print(
            f"| {n} | {len(pos.classes)} | {len(neg.classes)} | {c.lambda_} | {c.lambda_sl2c} | {c.consistent} | {same} |"
        )
        if not same:
            print(f"\n  sigma_{n}  = {format_sigma_exact(pos.sigma)}\n  sigma_-{n} = {format_sigma_exact(neg.sigma)}\n")


if __name__ == "__main__":
    main()
