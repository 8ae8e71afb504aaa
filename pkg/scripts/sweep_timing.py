#!/usr/bin/env python3
"""Per-phase wall time of the pipeline versus n and working precision.

    python3 scripts/sweep_timing.py --n-max 10 --precisions 128 192 --csv timing.csv

Exact elimination (resultants over Z[s]) is memoised per n inside a
process, so every run clears that memo first to report cold timings.
"""
from __future__ import annotations

import argparse
import csv
import sys
import time

from fig8torsion.config import RunConfig
from fig8torsion.report import run_pipeline
from fig8torsion.repvariety import surgery_equations, symbolic_word


def cold_run(n: int, bits: int) -> dict:
    surgery_equations.cache_clear()
    symbolic_word.cache_clear()
    t0 = time.perf_counter()
    eqs = surgery_equations(n)
    t_elim = time.perf_counter() - t0
    r = run_pipeline(n, RunConfig(precision_bits=bits))
    return {
        "n": n,
        "precision_bits": bits,
        "eliminant_degree": eqs.eliminant.degree,
        "elimination_s": round(t_elim, 4),
        # enumerate includes root finding and Newton polishing; elimination is already memoised here
        "roots_and_polish_s": round(r.timings["enumerate"], 4),
        "dedup_s": round(r.timings["dedup"], 4),
        "torsion_s": round(r.timings["torsion"], 4),
        "total_s": round(time.perf_counter() - t0, 4),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n-max", type=int, default=10)
    ap.add_argument("--precisions", type=int, nargs="+", default=[128])
    ap.add_argument("--csv", default="-", help="output path or - for stdout")
    args = ap.parse_args()

    rows = [cold_run(n, bits) for bits in args.precisions for n in range(1, args.n_max + 1)]
    fh = sys.stdout if args.csv == "-" else open(args.csv, "w", newline="")
    w = csv.DictWriter(fh, fieldnames=list(rows[0]))
    w.writeheader()
    w.writerows(rows)
    if fh is not sys.stdout:
        fh.close()
    for bits in args.precisions:
        total = sum(r["total_s"] for r in rows if r["precision_bits"] == bits)
        print(f"# {bits} bits: n=1..{args.n_max} in {total:.1f}s", file=sys.stderr)


if __name__ == "__main__":
    main()
