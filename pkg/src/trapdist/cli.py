"""Command-line front end: ``trapdist {eval,sample,verify,fit,curves}``."""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile
from typing import Callable, Sequence

import numpy as np

from . import dist, polyfit, verify
from .geom import D_MAX, Case, all_cases, make_arrangement, make_rng, sample_distances

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

CASES = ("ab", "cd", "ef", "gh")
KS_PASS_FRACTION = 0.90

fmt = verify.fmt


def finite_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return value


def positive_float(text: str) -> float:
    value = finite_float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def count(minimum: int) -> Callable[[str], int]:
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}: {text!r}")
        return value

    return parse


def parse_seeds(text: str) -> list[int]:
    """Parse ``7``, ``1..100`` (inclusive) or comma-separated mixtures of both."""
    seeds: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                a, b = part.split("..", 1)
                lo, hi = int(a), int(b)
                if hi < lo:
                    raise ValueError
                seeds.extend(range(lo, hi + 1))
            else:
                seeds.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list: {text!r}") from None
    if not seeds or min(seeds) < 0:
        raise argparse.ArgumentTypeError(f"bad seed list: {text!r}")
    return sorted(set(seeds))


def write_output(path: str | None, writer: Callable[[io.TextIOBase], None]) -> None:
    """Write to ``path`` atomically (temp file + rename), or to stdout."""
    if path is None or path == "-":
        writer(sys.stdout)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".trapdist-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_writer(rows: Sequence[Sequence[str]]) -> Callable[[io.TextIOBase], None]:
    def write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerows(rows)

    return write


def cmd_eval(args) -> int:
    fn = dist.scaled_cdf if args.kind == "cdf" else dist.scaled_pdf
    print(fmt(fn(Case.parse(args.case), args.scale, args.d)))
    return EXIT_OK


def cmd_sample(args) -> int:
    d = sample_distances(make_arrangement(args.case), make_rng(args.seed), args.n)
    write_output(args.output, _csv_writer([["d"]] + [[fmt(x)] for x in d]))
    return EXIT_OK


def cmd_curves(args) -> int:
    cases = all_cases(args.case)
    grid = np.linspace(0.0, max(D_MAX[c] for c in cases), args.grid)
    header = ["d"]
    columns = [grid]
    for c in cases:
        tag = c.value.lower()
        header += [f"pdf_{tag}", f"cdf_{tag}"]
        columns += [dist.pdf(c, grid), dist.cdf(c, grid)]
    rows = [header] + [[fmt(v) for v in row] for row in zip(*columns)]
    write_output(args.output, _csv_writer(rows))
    return EXIT_OK


def cmd_fit(args) -> int:
    cfg = polyfit.FitConfig(args.degree, args.grid)
    header = ["case", "degree", "normr"] + [f"c_{k}" for k in range(cfg.degree, -1, -1)]
    rows = [header]
    summary = []
    for c in all_cases(args.case):
        res = polyfit.fit_pdf(c, cfg)
        rows.append([c.value.lower(), str(cfg.degree), fmt(res.norm_residuals)]
                    + [fmt(x) for x in res.coefficients])
        summary.append(f"{c.value.lower()} normr={fmt(res.norm_residuals)}")
    write_output(args.output, _csv_writer(rows))
    stream = sys.stdout if args.output not in (None, "-") else sys.stderr
    print("\n".join(summary), file=stream)
    return EXIT_OK


def cmd_verify(args) -> int:
    rows = [list(verify.REPORT_HEADER)]
    ok = True
    for c in all_cases(args.case):
        checks = verify.consistency_suite(c)
        reports = verify.run_verification(c, args.n, args.seeds)
        rows += [chk.row() for chk in checks]
        rows += [r.as_check().row() for r in reports]
        frac = sum(r.passed for r in reports) / len(reports)
        consistent = all(chk.passed for chk in checks)
        ok &= consistent and frac >= KS_PASS_FRACTION
        print(
            f"{c.value.lower()}: consistency={'pass' if consistent else 'FAIL'} "
            f"ks_pass={sum(r.passed for r in reports)}/{len(reports)}",
            file=sys.stderr,
        )
    write_output(args.output, _csv_writer(rows))
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trapdist",
        description="Distance distributions within and between unit trapezoids.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a PDF or CDF value")
    p.add_argument("case", choices=CASES)
    p.add_argument("-d", type=finite_float, required=True, help="distance")
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--pdf", dest="kind", action="store_const", const="pdf", help="density (default)")
    kind.add_argument("--cdf", dest="kind", action="store_const", const="cdf", help="distribution function")
    p.set_defaults(kind="pdf", func=cmd_eval)
    p.add_argument("--scale", type=positive_float, default=1.0, help="side scale factor s > 0 (default 1)")

    p = sub.add_parser("sample", help="write simulated distances, one per line")
    p.add_argument("case", choices=CASES)
    p.add_argument("-n", type=count(1), default=10_000, help="number of pairs (default 10000)")
    p.add_argument("-s", "--seed", type=count(0), default=0, help="random seed (default 0)")
    p.add_argument("-o", "--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", help="Monte Carlo KS tests and consistency checks")
    p.add_argument("case", choices=CASES + ("all",))
    p.add_argument("-n", type=count(100), default=10_000, help="pairs per seed (default 10000)")
    p.add_argument("--seeds", type=parse_seeds, default=parse_seeds("1..100"),
                   help="seed list, e.g. 7, 1..100 or 1,5..9 (default 1..100)")
    p.add_argument("-o", "--output", help="report CSV path (default stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fit", help="least-squares polynomial fits of the PDFs")
    p.add_argument("case", choices=CASES + ("all",))
    p.add_argument("-D", "--degree", type=count(1), default=polyfit.DEFAULT_DEGREE,
                   help=f"polynomial degree (default {polyfit.DEFAULT_DEGREE})")
    p.add_argument("-g", "--grid", type=count(2), default=polyfit.DEFAULT_GRID,
                   help=f"grid points on [0, d_max] (default {polyfit.DEFAULT_GRID})")
    p.add_argument("-o", "--output", help="coefficient CSV path (default stdout)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("curves", help="PDF/CDF curves on a uniform grid")
    p.add_argument("case", choices=CASES + ("all",))
    p.add_argument("-g", "--grid", type=count(2), default=1000, help="number of rows (default 1000)")
    p.add_argument("-o", "--output", help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_curves)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "fit" and args.grid <= args.degree + 1:
        parser.error(f"grid ({args.grid}) must exceed degree + 1 ({args.degree + 1})")
    try:
        return args.func(args)
    except OSError as exc:
        print(f"trapdist: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
