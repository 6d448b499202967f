"""Command-line front end.

Results go to stdout (or ``--output``), diagnostics to stderr.  Exit codes:
0 everything certified, 2 violations found, 3 indeterminate results remain,
64 usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from contextlib import contextmanager
from typing import Optional, Sequence

from . import __version__
from .certify import (
    HYPERBOLIC_IN_AB,
    INDETERMINATE,
    certify_range,
    conjecture2_scan,
    density_profile,
    onset,
)
from .genseq import InstanceError, ProblemInstance, generate
from .interval import interval_report
from .polycore import parse_rational
from .theta import (
    a_b_functions,
    denominator_roots,
    h_theta_detail,
    theta_sweep,
)

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_INDETERMINATE = 3
EXIT_USAGE = 64

log = logging.getLogger("hyperzero")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_instance(text) -> ProblemInstance:
    """Validate a UTF-8 JSON instance document ``{"roots": [...], "leading": "p/q", "r": k}``."""
    return ProblemInstance.from_json(text)


def _load_instance(args) -> ProblemInstance:
    if args.instance is not None:
        src = args.instance
        if not src.lstrip().startswith("{") and os.path.exists(src):
            with open(src, "rb") as fh:
                src = fh.read()
        return parse_instance(src)
    if args.roots is None or args.r is None:
        raise UsageError("give --instance, or --roots together with --r")
    roots = [x for x in args.roots.split(",") if x.strip()]
    return ProblemInstance(tuple(roots), args.leading, args.r)


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {v}")
    return v


def _positive_rational(text: str):
    try:
        v = parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive value, got {text}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _jobs(args) -> int:
    env = os.environ.get("HYPERZERO_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"HYPERZERO_JOBS must be an integer, got {env!r}")
    return args.jobs


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), sort_keys=False)


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("instance")
    g.add_argument("--instance", help="JSON document or path to one")
    g.add_argument("--roots", help="comma-separated positive rationals, e.g. 1,3/2")
    g.add_argument("--leading", default="1", help="leading magnitude (default 1)")
    g.add_argument("--r", type=_positive_int, help="shift exponent")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hyperzero", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--output", "-o", help="write results to this file instead of stdout")
    parser.add_argument("--jobs", type=_positive_int, default=1, help="worker processes (HYPERZERO_JOBS overrides)")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("generate", help="exact H_0..H_M as JSON lines")
    _add_instance_args(p)
    p.add_argument("--m-max", type=_nonneg_int, required=True)

    p = sub.add_parser("interval", help="critical polynomial and zero interval")
    _add_instance_args(p)
    p.add_argument("--width", type=_positive_rational, default=parse_rational(f"1/{2**64}"))

    p = sub.add_parser("parametrize", help="CSV sweep of the angle parametrization")
    _add_instance_args(p)
    p.add_argument("--theta-grid", type=_positive_int, default=100, help="number of interior angles")
    p.add_argument("--m", type=_nonneg_int, help="also evaluate H(theta; m)")
    p.add_argument("--l", type=_nonneg_int, help="branch (default n-1)")

    p = sub.add_parser("certify", help="exact certificates for m = 0..M")
    _add_instance_args(p)
    p.add_argument("--m-max", type=_nonneg_int, required=True)
    p.add_argument("--method", choices=("auto", "sturm", "sign-changes"), default="auto")

    p = sub.add_parser("onset", help="least m from which every certificate passes")
    _add_instance_args(p)
    p.add_argument("--m-max", type=_nonneg_int, required=True)
    p.add_argument("--method", choices=("auto", "sturm", "sign-changes"), default="auto")

    p = sub.add_parser("density", help="gap and coverage statistics of the zero set")
    _add_instance_args(p)
    p.add_argument("--m-max", type=_positive_int, required=True)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--b-cap", type=_positive_float, help="upper end of the window when b is infinite")
    p.add_argument("--zeros", action="store_true", help="include the zero multiset")

    p = sub.add_parser("conjecture2", help="realness scan for P(t) + C t^s + z t^r")
    _add_instance_args(p)
    p.add_argument("--coeffs", help="comma-separated coefficients of P instead of roots")
    p.add_argument("--C", dest="C", required=True, help="rational C")
    p.add_argument("--s", dest="s", type=_nonneg_int, required=True)
    p.add_argument("--m-max", type=_nonneg_int, required=True)
    p.add_argument("--z-sign", type=int, choices=(1, -1), default=1)
    return parser


# -- commands -------------------------------------------------------------------


def cmd_generate(args, out) -> int:
    inst = _load_instance(args)
    seq = generate(inst, args.m_max)
    for m, p in enumerate(seq):
        out.write(_dump({"m": m, "degree": p.degree, "coeffs": p.to_json()}) + "\n")
    return EXIT_OK


def cmd_interval(args, out) -> int:
    inst = _load_instance(args)
    rep = interval_report(inst, args.width)
    out.write(_dump(rep.to_json()) + "\n")
    return EXIT_OK


def _fmt(x: float) -> str:
    return repr(float(x))


def cmd_parametrize(args, out) -> int:
    inst = _load_instance(args)
    n = args.theta_grid
    top = math.pi / inst.r
    thetas = [top * (k + 1) / (n + 1) for k in range(n)]
    sols = theta_sweep(inst, thetas, args.l)
    seq = generate(inst, args.m) if args.m is not None else None
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["theta", "tau", "z", "A", "B", "min_excess", "h_value"])
    for sol in sols:
        A, B = a_b_functions(sol)
        frame = denominator_roots(sol)
        h = ""
        if seq is not None:
            h = _fmt(h_theta_detail(sol, args.m, seq, frame).value)
        w.writerow([_fmt(sol.theta), _fmt(sol.tau), _fmt(sol.z), _fmt(A), _fmt(B), _fmt(frame.min_excess), h])
    return EXIT_OK


def _exit_for(verdicts) -> int:
    verdicts = list(verdicts)
    if any(v not in (HYPERBOLIC_IN_AB, INDETERMINATE) for v in verdicts):
        return EXIT_VIOLATION
    if any(v == INDETERMINATE for v in verdicts):
        return EXIT_INDETERMINATE
    return EXIT_OK


def cmd_certify(args, out) -> int:
    inst = _load_instance(args)
    seq = generate(inst, args.m_max)
    rep = interval_report(inst)
    certs = certify_range(inst, seq, rep, range(args.m_max + 1), args.method, _jobs(args))
    for c in certs:
        out.write(_dump(c.to_json()) + "\n")
    return _exit_for(c.verdict for c in certs)


def cmd_onset(args, out) -> int:
    inst = _load_instance(args)
    res = onset(inst, args.m_max, method=args.method, jobs=_jobs(args))
    out.write(_dump(res.to_json()) + "\n")
    if res.m0 is None:
        return _exit_for(c.verdict for c in res.certificates)
    return _exit_for(v for _, v in res.violations)


def cmd_density(args, out) -> int:
    inst = _load_instance(args)
    if args.bins < 10:
        raise UsageError("--bins must be at least 10")
    seq = generate(inst, args.m_max)
    rep = interval_report(inst)
    res = onset(inst, args.m_max, seq, rep, jobs=_jobs(args))
    certs = res.certificates
    m0 = res.m0 if res.m0 is not None else args.m_max
    large = density_profile(inst, seq, rep, args.m_max, args.bins, args.b_cap, m_min=m0, certificates=certs)
    every = density_profile(inst, seq, rep, args.m_max, args.bins, args.b_cap, m_min=0, certificates=certs)
    doc = {
        "m0": res.m0,
        "large_m": large.to_json(args.zeros),
        "all_m": every.to_json(args.zeros),
    }
    out.write(_dump(doc) + "\n")
    return EXIT_OK


def cmd_conjecture2(args, out) -> int:
    C = parse_rational(args.C)
    if args.coeffs is not None:
        coeffs = [parse_rational(x) for x in args.coeffs.split(",")]
        if args.r is None:
            raise UsageError("--r is required")
        scan = conjecture2_scan(C, args.s, args.r, args.m_max, coeffs=coeffs, z_sign=args.z_sign)
    else:
        inst = _load_instance(args)
        scan = conjecture2_scan(
            C, args.s, inst.r, args.m_max, roots=inst.roots, leading=inst.leading, z_sign=args.z_sign
        )
    if not scan.hypothesis_holds:
        log.warning("C(s - r) < 0: outside the hypothesis of the conjecture")
    for row in scan.rows:
        out.write(_dump(row.to_json()) + "\n")
    out.write(_dump(scan.to_json()) + "\n")
    return EXIT_VIOLATION if scan.non_real else EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "interval": cmd_interval,
    "parametrize": cmd_parametrize,
    "certify": cmd_certify,
    "onset": cmd_onset,
    "density": cmd_density,
    "conjecture2": cmd_conjecture2,
}


@contextmanager
def _sink(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
        sys.stdout.flush()
        return
    buf = io.StringIO()
    yield buf
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        with _sink(args.output) as out:
            return COMMANDS[args.command](args, out)
    except InstanceError as exc:
        sys.stderr.write(_dump({"error": "invalid instance", "violations": exc.violations}) + "\n")
        return EXIT_USAGE
    except UsageError as exc:
        sys.stderr.write(f"hyperzero: error: {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        sys.stderr.write(f"hyperzero: error: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
