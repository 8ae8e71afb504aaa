"""Command-line front end: ``fig8torsion {enumerate,sigma,verify,casson} -n N``.

``-n`` takes an integer or an inclusive range ``a..b``.  Exit status is 0 on
success, 1 on a verification mismatch, 2 on a usage error and 3 when the
numerics could not certify a result.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import OUTPUT_FORMATS, RunConfig
from .oracle.golden import GOLDEN_RANGE
from .report import (
    EnumerationReport,
    NumericalFailure,
    format_sigma_exact,
    format_sigma_sci,
    from_dict,
    load_or_run,
    render_csv,
    render_json,
    render_markdown,
    to_dict,
    verify_report,
)
from .repvariety import DomainError, SurgerySpec
from .torsion import casson_values, sigma_for

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

log = logging.getLogger("fig8torsion")


class UsageError(Exception):
    pass


def parse_n(text: str) -> list[int]:
    """``"3"`` -> [3]; ``"1..3"`` -> [1, 2, 3]; ``"-3..-1"`` -> [-3, -2, -1]."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
            if lo > hi:
                raise UsageError(f"empty range {text!r}")
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError:
        raise UsageError(f"-n expects an integer or a range a..b, got {text!r}") from None


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "fig8torsion"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-n", required=True, help="surgery coefficient 1/n: integer or range a..b")
    common.add_argument("--format", choices=OUTPUT_FORMATS, default="markdown", dest="output_format")
    common.add_argument("--precision", type=int, default=128, help="working precision in bits (>= 53)")
    common.add_argument("--tol-residual", type=float, default=1e-9)
    common.add_argument("--tol-dedup", type=float, default=1e-9)
    common.add_argument("--tol-table", type=float, default=1e-3)
    common.add_argument("--tol-round", type=float, default=1e-6)
    common.add_argument("--cache-dir", type=Path, default=None, help="result cache (default: user cache dir)")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for ranges of n")
    common.add_argument("--timings", action="store_true", help="include per-phase timings in JSON output")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="fig8torsion", description="Torsion of 1/n surgeries on the figure-eight knot.")
    sub = p.add_subparsers(dest="command", required=True)
    e = sub.add_parser("enumerate", parents=[common], help="list classes with s, u and torsion")
    e.add_argument("--all", action="store_true", dest="show_all", help="one row per class instead of merged conjugate pairs")
    sub.add_parser("sigma", parents=[common], help="torsion polynomial")
    sub.add_parser("verify", parents=[common], help="compare with the golden tables")
    sub.add_parser("casson", parents=[common], help="Casson invariants and observed counts")
    return p


def config_from_args(args) -> RunConfig:
    try:
        return RunConfig(
            precision_bits=args.precision,
            tol_residual=args.tol_residual,
            tol_dedup=args.tol_dedup,
            tol_table=args.tol_table,
            tol_round=args.tol_round,
            output_format=args.output_format,
            cache_dir=None if args.no_cache else (args.cache_dir or default_cache_dir()),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _worker(n: int, config: RunConfig, use_cache: bool) -> dict:
    report, _ = load_or_run(n, config, use_cache=use_cache)
    return to_dict(report, include_timings=True)


def run_reports(ns: list[int], config: RunConfig, *, jobs: int = 1) -> list[EnumerationReport]:
    use_cache = config.cache_dir is not None
    if jobs > 1 and len(ns) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            dicts = list(pool.map(_worker, ns, [config] * len(ns), [use_cache] * len(ns)))
        reports = [from_dict(d) for d in dicts]
        for r in reports:
            r.config = config
        return reports
    out = []
    for n in ns:
        t0 = time.perf_counter()
        report, hit = load_or_run(n, config, use_cache=use_cache)
        log.info("n=%d: %s in %.2fs", n, "cache hit" if hit else "computed", time.perf_counter() - t0)
        out.append(report)
    return out


def _check_nonzero(ns: list[int]) -> None:
    for n in ns:
        try:
            SurgerySpec(n)
        except DomainError as exc:
            raise UsageError(str(exc)) from None


def cmd_enumerate(ns, config, args) -> int:
    _check_nonzero(ns)
    reports = run_reports(ns, config, jobs=args.jobs)
    if config.output_format == "json":
        sys.stdout.write(render_json(reports[0] if len(reports) == 1 else reports, include_timings=args.timings))
    elif config.output_format == "csv":
        sys.stdout.write(render_csv(reports))
    else:
        for i, r in enumerate(reports):
            if len(reports) > 1:
                sys.stdout.write(("\n" if i else "") + f"## n = {r.n}\n\n")
            sys.stdout.write(render_markdown(r, show_all=args.show_all))
    return EXIT_OK


def cmd_sigma(ns, config, args) -> int:
    results = []
    nonzero = [n for n in ns if n != 0]
    _check_nonzero(nonzero)
    reports = {r.n: r for r in run_reports(nonzero, config, jobs=args.jobs)}
    for n in ns:
        poly = reports[n].sigma if n in reports else sigma_for(0)
        results.append((n, poly))
    if config.output_format == "json":
        payload = [
            {
                "n": n,
                "degree": p.degree,
                "coeffs": [str(c) for c in p.rational_coeffs()][::-1],
                "exact": format_sigma_exact(p),
                "scientific": format_sigma_sci(p),
            }
            for n, p in results
        ]
        sys.stdout.write(json.dumps(payload[0] if len(payload) == 1 else payload, indent=2) + "\n")
        return EXIT_OK
    if config.output_format == "csv":
        sys.stdout.write("n,degree,coefficient\n")
        for n, p in results:
            for k, c in enumerate(p.rational_coeffs()):
                sys.stdout.write(f"{n},{k},{c}\n")
        return EXIT_OK
    for n, p in results:
        prefix = f"sigma_{n}(t) = " if len(results) > 1 else ""
        exact, sci = format_sigma_exact(p), format_sigma_sci(p)
        sys.stdout.write(prefix + exact + "\n")
        if sci != exact:
            sys.stdout.write(" " * len(prefix) + "~ " + sci + "\n")
    return EXIT_OK


def cmd_verify(ns, config, args) -> int:
    bad = [n for n in ns if n not in GOLDEN_RANGE]
    if bad:
        raise UsageError(f"golden tables exist for n in 1..10 only, got {bad}")
    results = [verify_report(r) for r in run_reports(ns, config, jobs=args.jobs)]
    if config.output_format == "json":
        payload = [{"n": v.n, "ok": v.ok, **v.details} for v in results]
        sys.stdout.write(json.dumps(payload, indent=2, default=str) + "\n")
    else:
        for v in results:
            sys.stdout.write("\n".join(v.lines) + "\n")
            sys.stdout.write(f"n={v.n}: {'OK' if v.ok else 'MISMATCH'}\n")
    return EXIT_OK if all(v.ok for v in results) else EXIT_MISMATCH


def cmd_casson(ns, config, args) -> int:
    _check_nonzero(ns)
    reports = run_reports(ns, config, jobs=args.jobs)
    rows = []
    for r in reports:
        c = r.casson
        assert (c.lambda_, c.lambda_sl2c) == casson_values(r.n)
        rows.append(
            {
                "n": c.n,
                "lambda": c.lambda_,
                "lambda_sl2c": c.lambda_sl2c,
                "su2_classes": c.observed_su2_classes,
                "sl2r_classes": c.observed_sl2r_classes,
                "total_classes": c.observed_total_classes,
                "consistent": c.consistent,
            }
        )
    if config.output_format == "json":
        sys.stdout.write(json.dumps(rows[0] if len(rows) == 1 else rows, indent=2) + "\n")
    elif config.output_format == "csv":
        sys.stdout.write(",".join(rows[0]) + "\n")
        for row in rows:
            sys.stdout.write(",".join(str(v) for v in row.values()) + "\n")
    else:
        sys.stdout.write("| n | lambda | lambda_SL2C | SU(2) classes | SL(2,R) classes | total | consistent |\n")
        sys.stdout.write("|--:|--:|--:|--:|--:|--:|:-:|\n")
        for row in rows:
            sys.stdout.write("| " + " | ".join(str(v) for v in row.values()) + " |\n")
    return EXIT_OK


COMMANDS = {"enumerate": cmd_enumerate, "sigma": cmd_sigma, "verify": cmd_verify, "casson": cmd_casson}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        ns = parse_n(args.n)
        config = config_from_args(args)
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        return COMMANDS[args.command](ns, config, args)
    except UsageError as exc:
        print(f"fig8torsion: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"fig8torsion: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
