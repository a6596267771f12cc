"""Command-line front end.

    congruent verify N [--digits P] [--terms M] [--disc D] [--double-first]
                       [--lattice-scale S] [--cache PATH] [--json]
    congruent triangle N [same flags]
    congruent coeffs N --limit M [--cache PATH]

Exit status: 0 congruent, 2 inapplicable, 3 inconclusive, 1 usage or internal
error.  Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

from .arith import is_squarefree
from .heegner import Config, Verdict, verify
from .lseries import CacheFormatError, coefficients, read_cache, write_cache

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INAPPLICABLE = 2
EXIT_INCONCLUSIVE = 3

_STATUS = {
    Verdict.CONGRUENT: EXIT_OK,
    Verdict.INAPPLICABLE: EXIT_INAPPLICABLE,
    Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _squarefree(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if n < 1 or not is_squarefree(n):
        raise argparse.ArgumentTypeError(f"{n} is not a square-free positive integer")
    return n


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None


def _add_verify_flags(p: argparse.ArgumentParser):
    p.add_argument("n", type=_squarefree)
    p.add_argument("--digits", type=int, default=60, metavar="P",
                   help="working precision in decimal digits (default 60)")
    p.add_argument("--terms", type=int, metavar="M",
                   help="fixed number of q-expansion terms (default: from the tail bound)")
    p.add_argument("--disc", type=int, metavar="D", help="use this discriminant only")
    p.add_argument("--double-first", action="store_true",
                   help="always double the point before extracting the triangle")
    p.add_argument("--lattice-scale", type=_fraction, default=Fraction(1), metavar="S")
    p.add_argument("--cache", metavar="PATH", help="coefficient cache file")
    p.add_argument("--force", action="store_true",
                   help="attempt the computation even when the root number is +1")
    p.add_argument("--json", action="store_true", help="print the certificate as JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="congruent", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add_verify_flags(sub.add_parser("verify", help="certify that n is a congruent number"))
    _add_verify_flags(sub.add_parser("triangle", help="print a rational right triangle of area n"))
    pc = sub.add_parser("coeffs", help="write or extend an L-series coefficient cache")
    pc.add_argument("n", type=_squarefree)
    pc.add_argument("--limit", type=int, required=True, metavar="M")
    pc.add_argument("--cache", metavar="PATH",
                    help="cache file (default: coeffs-<n>.cnvc in the current directory)")
    return parser


def _config(args) -> Config:
    return Config(digits=args.digits, terms=args.terms, disc=args.disc,
                  lattice_scale=args.lattice_scale, cache_path=args.cache,
                  output="json" if args.json else "text", double_first=args.double_first,
                  force=args.force)


def _frac(v) -> str:
    return f"{v.numerator}/{v.denominator}"


def cmd_verify(args, out) -> int:
    cert = verify(args.n, _config(args))
    if args.json:
        json.dump(cert.to_dict(), out, indent=2)
        out.write("\n")
    else:
        out.write(f"n = {cert.n}: {cert.verdict.value}\n")
        if cert.D is not None:
            out.write(f"discriminant D = {cert.D}, class number {cert.h}, r = {cert.r}\n")
        if cert.point is not None:
            x, y = cert.point
            out.write(f"point: x = {_frac(x)}\n       y = {_frac(y)}\n")
            a, b, c = cert.triangle
            out.write(f"triangle: {_frac(a)} {_frac(b)} {_frac(c)}\n")
    if cert.verdict is not Verdict.CONGRUENT:
        print(cert.diagnostics.get("reason", ""), file=sys.stderr)
    return _STATUS[cert.verdict]


def cmd_triangle(args, out) -> int:
    cert = verify(args.n, _config(args))
    if cert.verdict is Verdict.CONGRUENT:
        out.write(" ".join(_frac(s) for s in cert.triangle) + "\n")
    else:
        out.write(f"{cert.verdict.value}\n")
        print(cert.diagnostics.get("reason", ""), file=sys.stderr)
    return _STATUS[cert.verdict]


def cmd_coeffs(args, out) -> int:
    if args.limit < 1:
        raise UsageError("--limit must be at least 1")
    path = args.cache or f"coeffs-{args.n}.cnvc"
    base = None
    if os.path.exists(path):
        base = read_cache(path)
        if base.n != args.n:
            raise CacheFormatError(f"{path} holds coefficients for n={base.n}")
        if base.limit >= args.limit:
            print(f"{path}: already holds a_m for m <= {base.limit}", file=sys.stderr)
            return EXIT_OK
    table = coefficients(args.n, args.limit, base=base)
    write_cache(path, table)
    print(f"{path}: a_m for m <= {table.limit}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "triangle": cmd_triangle, "coeffs": cmd_coeffs}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
