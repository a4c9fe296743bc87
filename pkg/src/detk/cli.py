"""``detk`` command line: derive, check, verify, table.

Exit codes: 0 success, 1 check/verify failure, 2 usage or cap error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import correction, verify
from .matnum import read_matrix
from .ncpoly import CapError, format_poly, format_poly_latex

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_IO = 3

FORMATS = ("text", "json", "latex")


class UsageError(Exception):
    pass


def parse_int_list(text: str) -> list[int]:
    """``"1..4,7"`` -> ``[1, 2, 3, 4, 7]``; ranges are inclusive."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, hi = (int(x) for x in part.split("..", 1))
                if hi < lo:
                    raise UsageError(f"empty range {part!r}")
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise UsageError(f"not an integer list: {text!r}") from None
    if not out:
        raise UsageError(f"empty integer list: {text!r}")
    return out


def _k_values(text: str) -> list[int]:
    ks = parse_int_list(text)
    if min(ks) < 1:
        raise UsageError("k must be >= 1")
    return ks


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(output).write_text(text if text.endswith("\n") else text + "\n")


def cmd_derive(args) -> int:
    ks = _k_values(args.k)
    sets = [correction.derive(k, args.cap) for k in ks]
    if args.format == "json":
        payload = [s.to_json_obj() for s in sets]
        text = json.dumps(payload[0] if len(payload) == 1 else payload, indent=1)
    elif args.format == "latex":
        text = "\n\n".join(s.to_latex() for s in sets)
    else:
        text = "\n\n".join(s.to_text() for s in sets)
    _emit(text, args.output)
    return EXIT_OK


def cmd_check(args) -> int:
    if args.k_max < 1:
        raise UsageError("--k-max must be >= 1")
    failures = []
    rows = []
    for k in range(1, args.k_max + 1):
        t0 = time.perf_counter()
        dec = correction.verify_decomposition(k, args.cap)
        rows.append((f"k={k}", "log series = x_k + y_k", dec, time.perf_counter() - t0))
        if not dec:
            diff = correction.log_series(k) - correction.x_poly(k, args.cap) - correction.y_poly(k, args.cap)
            failures.append((f"decomposition k={k}", diff))
        t0 = time.perf_counter()
        rep = correction.verify_lemma_membership(k, args.cap)
        dt = time.perf_counter() - t0
        for c in rep.checks:
            rows.append((f"k={k}", c.name, c.passed, dt))
            if not c.passed:
                failures.append((c.name, c.counterexample))
    for c in correction.verify_z_oracle(args.k_max):
        rows.append(("z", c.name, c.passed, 0.0))
        if not c.passed:
            failures.append((c.name, c.counterexample))
    for tag, name, ok, dt in rows:
        print(f"{tag:6} {'PASS' if ok else 'FAIL'}  {name}")
    print(f"{len(rows)} checks, {len(rows) - len(failures)} passed")
    if failures:
        name, poly = failures[0]
        print(f"first failure: {name}: {format_poly(poly) if poly is not None else '?'}",
              file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify(args) -> int:
    ks = _k_values(args.k)
    if args.tol <= 0:
        raise UsageError("--tol must be > 0")
    reports = []
    if args.pair:
        try:
            A, B = read_matrix(args.pair[0]), read_matrix(args.pair[1])
        except OSError as exc:
            print(f"cannot read matrix file: {exc}", file=sys.stderr)
            return EXIT_IO
        except ValueError as exc:
            print(f"malformed matrix file: {exc}", file=sys.stderr)
            return EXIT_USAGE
        if A.shape != B.shape:
            print(f"dimension mismatch: {A.shape} vs {B.shape}", file=sys.stderr)
            return EXIT_USAGE
        prov = {"files": list(args.pair)}
        for k in ks:
            rep = verify.product_formula_check(A, B, k, args.tol, provenance=prov)
            rep.extras["commutation_residual"] = verify.commutation_check(A, B, k)
            reports.append(rep)
    else:
        ns = parse_int_list(args.n)
        seeds = parse_int_list(args.seeds)
        if min(ns) < 1:
            raise UsageError("-n must be >= 1")
        if args.radius <= 0:
            raise UsageError("--radius must be > 0")
        for k in ks:
            correction.trace_correction(k, args.cap)  # cap check before the grid runs
            for n in ns:
                for seed in seeds:
                    reports.append(verify.run_cell(k, n, seed, args.radius, args.tol))
    lines = "\n".join(r.to_json() for r in reports)
    try:
        _emit(lines, args.output)
    except OSError as exc:
        print(f"cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    bad = [r for r in reports if not verify.cell_ok(r)]
    worst = max((r.residual for r in reports), default=0.0)
    print(f"{len(reports)} cells, {len(reports) - len(bad)} within tol {args.tol:g}, "
          f"worst residual {worst:.3e}", file=sys.stderr)
    if args.no_gate:
        return EXIT_OK
    return EXIT_FAIL if bad else EXIT_OK


def cmd_table(args) -> int:
    ks = _k_values(args.k)
    lines = []
    for k in ks:
        tf = correction.trace_correction(k, args.cap)
        if args.format == "latex":
            lines.append(rf"\operatorname{{tr}}(X_{{{k}}}(A,B)) &= \operatorname{{tr}}\big({format_poly_latex(tf)}\big) \\")
        else:
            lines.append(f"tr X_{k} = tr({format_poly(tf)})    [{len(tf)} words]")
    _emit("\n".join(lines), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="detk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--cap", type=int, default=None,
                       help="expansion cap on k (default: $DETK_CAP_K or 12)")
        p.add_argument("-o", "--output", default=None, help="write output to this file")

    p = sub.add_parser("derive", help="print x_k, y_k and the trace normal form of X_k")
    p.add_argument("-k", required=True, help="k or list/range such as 2 or 1..4")
    p.add_argument("--format", choices=FORMATS, default="text")
    common(p)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("check", help="exact lemma and decomposition suite for k = 1..k-max")
    p.add_argument("--k-max", type=int, default=6)
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify", help="numerical product-formula grid")
    p.add_argument("-k", default="1..6")
    p.add_argument("-n", default="8", help="dimension list, e.g. 2,4,8")
    p.add_argument("--seeds", default="1..25", help="seed list, e.g. 1..20")
    p.add_argument("--radius", type=float, default=verify.DEFAULT_RADIUS)
    p.add_argument("--tol", type=float, default=verify.DEFAULT_TOL)
    p.add_argument("--pair", nargs=2, metavar=("A.json", "B.json"),
                   help="verify on a matrix pair read from files instead of a seeded grid")
    p.add_argument("--no-gate", action="store_true", help="report residuals without failing")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table", help="trace table tr X_k for a range of k")
    p.add_argument("-k", default="1..4")
    p.add_argument("--format", choices=("text", "latex"), default="text")
    common(p)
    p.set_defaults(func=cmd_table)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, CapError) as exc:
        print(f"detk: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"detk: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
