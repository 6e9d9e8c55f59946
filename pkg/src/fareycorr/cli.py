"""Command-line entry point: ``fareycorr <command> [options]``.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from . import __version__, analytic, empirical, farey
from .arith import build_sieve, to_fraction
from .errors import FareyCorrError

SCHEMA_VERSION = "1"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CURVE_KINDS = {
    "g2": "g2",
    "bz": "boca_zaharescu",
    "gm": "coprime_m",
    "gue": "gue",
    "poisson": "poisson",
}


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# argument parsing


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _positive_fraction(text: str) -> Fraction:
    try:
        value = to_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text}") from exc
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _int_list(text: str) -> list[int]:
    return [_positive_int(t) for t in text.split(",") if t]


def _fraction_list(text: str) -> list[Fraction]:
    return [_positive_fraction(t) for t in text.split(",") if t]


def _predicate(text: str) -> farey.DenominatorPredicate:
    try:
        return farey.DenominatorPredicate.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _threads(text: str) -> int:
    if text == "auto":
        return os.cpu_count() or 1
    return _positive_int(text)


def _common(p: argparse.ArgumentParser, formats: bool = True) -> None:
    if formats:
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="write to this file instead of stdout")
    p.add_argument("--prime-cutoff", type=_positive_int, default=None,
                   help="prime product cutoff (default $FAREYCORR_PRIME_CUTOFF or 10^7)")
    p.add_argument("--threads", type=_threads, default=1, help="worker count or 'auto'")
    p.add_argument("--reproducible", action="store_true", help="omit the timestamp")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fareycorr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fareycorr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="list Farey fractions of order Q")
    p.add_argument("--q", type=_positive_int, required=True)
    p.add_argument("--den", type=_predicate, default=farey.SQUAREFREE,
                   help="all | squarefree | prime | coprime:M")
    _common(p)

    p = sub.add_parser("count", help="count square-free-denominator Farey fractions")
    p.add_argument("--q", type=_positive_int, required=True)
    p.add_argument("--compare", action="store_true", help="add the asymptotic main term")
    _common(p)

    p = sub.add_parser("paircorr", help="empirical pair-correlation histogram")
    p.add_argument("--q", type=_positive_int, required=True)
    p.add_argument("--den", type=_predicate, default=farey.SQUAREFREE)
    p.add_argument("--lambda-max", type=_positive_fraction, required=True)
    p.add_argument("--bins", type=_positive_int, default=1)
    _common(p)

    p = sub.add_parser("curve", help="sample a pair-correlation curve")
    p.add_argument("--kind", choices=sorted(CURVE_KINDS), required=True)
    p.add_argument("--lambda-max", type=_positive_fraction, required=True)
    p.add_argument("--step", type=_positive_fraction, required=True)
    p.add_argument("--m", type=_positive_int, default=None)
    p.add_argument("--cm", type=_positive_fraction, default=None,
                   help="externally sourced constant for the gm curve")
    _common(p)

    p = sub.add_parser("verify", help="run a verification suite (JSON verdicts)")
    vs = p.add_subparsers(dest="suite", required=True)
    s = vs.add_parser("expsum", help="exponential-sum identity")
    s.add_argument("--qmax", type=_positive_int, default=50)
    s.add_argument("--rmax", type=int, default=20)
    s.add_argument("--tol", type=float, default=1e-6)
    _common(s, formats=False)
    s = vs.add_parser("fm", help="closed form of F(m) against the factorization sum")
    s.add_argument("--mmax", type=_positive_int, default=100)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--closed-form", choices=("literal", "corrected"), default="literal")
    _common(s, formats=False)
    s = vs.add_parser("lattice", help="square-free lattice count against its main term")
    s.add_argument("--r", type=_positive_int, default=400)
    s.add_argument("--r1", type=_positive_int, default=1)
    s.add_argument("--r2", type=_positive_int, default=1)
    s.add_argument("--band", type=float, default=0.05)
    _common(s, formats=False)
    s = vs.add_parser("convergence", help="S_Lambda(Q) against the limiting integral")
    s.add_argument("--q", type=_int_list, default=[500, 1000, 2000, 4000])
    s.add_argument("--lambdas", type=_fraction_list, default=[Fraction(1), Fraction(2), Fraction(4)])
    s.add_argument("--den", type=_predicate, default=farey.SQUAREFREE, help="squarefree or all")
    s.add_argument("--band", type=float, default=0.15)
    _common(s, formats=False)
    return parser


# --------------------------------------------------------------------------
# output


def _plain(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, farey.DenominatorPredicate):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def _meta(args, **extra) -> dict:
    skip = {"command", "suite", "out", "format", "reproducible", "func"}
    params = {k: _plain(v) for k, v in sorted(vars(args).items()) if k not in skip}
    command = args.command if args.command != "verify" else f"verify {args.suite}"
    meta = {
        "tool": "fareycorr",
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "params": params,
        "timestamp": None if args.reproducible else datetime.now(timezone.utc).isoformat(),
    }
    meta.update({k: _plain(v) for k, v in extra.items()})
    return meta


def _render(fmt: str, meta: dict, columns: list[str], rows: list[list], json_data=None) -> str:
    if fmt == "json":
        data = json_data if json_data is not None else [dict(zip(columns, r)) for r in rows]
        return json.dumps({"meta": meta, "data": data}, indent=2, default=_plain) + "\n"
    buf = io.StringIO()
    buf.write("# meta: " + json.dumps(meta) + "\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cutoff(args) -> int:
    return args.prime_cutoff or analytic.default_prime_cutoff()


# --------------------------------------------------------------------------
# commands


def cmd_generate(args) -> int:
    tables = build_sieve(args.q)
    seq = farey.enumerate_farey(args.q, args.den, tables)
    rows = seq.pairs()
    meta = _meta(args, N=seq.count, Q=args.q, predicate=args.den)
    _emit(args, _render(args.format, meta, ["numerator", "denominator"], rows,
                        json_data=[list(r) for r in rows]))
    return EXIT_OK


def cmd_count(args) -> int:
    tables = build_sieve(args.q)
    n = farey.count_exact(args.q, tables)
    if not args.compare:
        meta = _meta(args)
        _emit(args, _render(args.format, meta, ["Q", "count"], [[args.q, n]]))
        return EXIT_OK
    cutoff = _cutoff(args)
    delta = analytic.carefree_delta(cutoff)
    asym = farey.count_asymptotic(args.q, delta)
    ratio = n / asym
    dev = abs(ratio - 1.0)
    meta = _meta(args, prime_cutoff=cutoff, tail_error_estimate=delta.tail_error_estimate)
    cols = ["Q", "count", "asymptotic", "ratio", "deviation", "scaled_deviation"]
    _emit(args, _render(args.format, meta, cols, [[args.q, n, asym, ratio, dev, dev * math.sqrt(args.q)]]))
    return EXIT_OK


def cmd_paircorr(args) -> int:
    tables = build_sieve(args.q)
    seq = farey.enumerate_farey(args.q, args.den, tables)
    window = empirical.WindowSpec(args.lambda_max, args.bins)
    hist = empirical.pair_correlation(seq, window, workers=args.threads)
    edges = window.edges()
    dens = hist.density()
    rows = [
        [float(edges[k]), float(edges[k + 1]), int(hist.counts[k]), float(dens[k])]
        for k in range(window.bins)
    ]
    meta = _meta(
        args, N=hist.N, Q=args.q, predicate=args.den, bin_width=window.bin_width,
        total=hist.total, s_lambda=hist.total / hist.N,
    )
    _emit(args, _render(args.format, meta, ["bin_lo", "bin_hi", "count", "density"], rows))
    return EXIT_OK


def cmd_curve(args) -> int:
    kind = CURVE_KINDS[args.kind]
    if kind == "coprime_m" and (args.m is None or args.cm is None):
        raise UsageError("curve --kind gm needs both --m and --cm (C_m is not derived here)")
    cutoff = _cutoff(args)
    n = math.floor(args.lambda_max / args.step)
    lams = [args.step * k for k in range(1, n + 1)]
    lam_f = np.array([float(x) for x in lams])
    extra: dict = {}
    need = 1000
    if kind == "boca_zaharescu":
        need = max(need, math.ceil(math.pi**2 * float(args.lambda_max) / 3) + 1)
    if kind == "coprime_m":
        need = max(need, args.m, math.floor(2 * args.lambda_max / args.cm) + 1)
        extra["note"] = "comparison curve, constant externally sourced"
    tables = build_sieve(need)
    if kind == "g2":
        values = analytic.g2_curve(lam_f, cutoff, tables)
        delta = analytic.carefree_delta(cutoff)
        extra.update(prime_cutoff=cutoff, tail_error_estimate=delta.tail_error_estimate,
                     support_threshold=analytic.support_threshold(cutoff))
    else:
        spec = analytic.CurveSpec(kind, cutoff, args.m, float(args.cm) if args.cm else None)
        values = np.array([analytic.curve_eval(spec, x, tables) for x in lam_f])
    rows = [[x, float(v)] for x, v in zip(lam_f.tolist(), values)]
    _emit(args, _render(args.format, _meta(args, **extra), ["lambda", "value"], rows))
    return EXIT_OK


def _verify_expsum(args, cutoff):
    qmax = args.qmax
    tables = build_sieve(max(qmax, abs(args.rmax), 2))
    seq = farey.enumerate_farey(qmax, farey.SQUAREFREE, tables)
    cases = []
    for Q in range(1, qmax + 1):
        worst, worst_r = 0.0, 0
        for r in range(0, args.rmax + 1):
            direct = farey.exponential_sum_direct(Q, r, tables, seq)
            formula = farey.exponential_sum_formula(Q, r, tables)
            gap = abs(direct - formula)
            if gap > worst:
                worst, worst_r = gap, r
        cases.append({"case": f"Q={Q}", "Q": Q, "max_gap": worst, "worst_r": worst_r,
                      "passed": worst < args.tol})
    return cases, {}


def _verify_fm(args, cutoff):
    tables = build_sieve(max(args.mmax, 2))
    C = analytic.base_product_C(cutoff)
    cases = []
    for m in range(1, args.mmax + 1):
        ref = analytic.fm_factorization(m, cutoff, tables).value
        lit = analytic.fm_closed(m, cutoff, tables).value
        cor = analytic.fm_closed_corrected(m, cutoff, tables).value
        scale = max(1.0, abs(ref))
        gap_lit = abs(lit - ref) / scale
        gap_cor = abs(cor - ref) / scale
        chosen = gap_lit if args.closed_form == "literal" else gap_cor
        cases.append({"case": f"m={m}", "m": m, "factorization_sum": ref, "closed_form": lit,
                      "corrected_closed_form": cor, "gap_closed_form": gap_lit,
                      "gap_corrected_closed_form": gap_cor, "passed": chosen <= args.tol})
    extra = {"prime_cutoff": cutoff, "tail_error_estimate": C.tail_error_estimate,
             "authoritative_route": "factorization_sum",
             "max_gap_closed_form": max(c["gap_closed_form"] for c in cases),
             "max_gap_corrected_closed_form": max(c["gap_corrected_closed_form"] for c in cases)}
    return cases, extra


def _verify_lattice(args, cutoff):
    tables = build_sieve(max(args.r, args.r1, args.r2, 2))
    region = empirical.LatticeRegion(args.r, args.r1, args.r2)
    res = empirical.lattice_count(region, tables, cutoff)
    dev = abs(res.ratio - 1.0)
    case = {"case": f"R={args.r},r1={args.r1},r2={args.r2}", "exact_count": res.exact_count,
            "main_term": res.main_term, "P": res.P, "ratio": res.ratio, "deviation": dev,
            "passed": dev <= args.band}
    return [case], {"prime_cutoff": cutoff,
                    "tail_error_estimate": analytic.carefree_delta(cutoff).tail_error_estimate}


def _verify_convergence(args, cutoff):
    if args.den.kind not in ("squarefree", "all"):
        raise UsageError("convergence suite supports --den squarefree or all")
    cases = empirical.convergence_ladder(args.q, args.lambdas, args.den, cutoff, args.band, args.threads)
    return cases, {"prime_cutoff": cutoff,
                   "tail_error_estimate": analytic.carefree_delta(cutoff).tail_error_estimate}


SUITES = {
    "expsum": _verify_expsum,
    "fm": _verify_fm,
    "lattice": _verify_lattice,
    "convergence": _verify_convergence,
}


def cmd_verify(args) -> int:
    cutoff = _cutoff(args)
    cases, extra = SUITES[args.suite](args, cutoff)
    passed = all(c["passed"] for c in cases)
    meta = _meta(args, **extra)
    data = {"suite": args.suite, "passed": passed, "cases": cases}
    _emit(args, json.dumps({"meta": meta, "data": data}, indent=2, default=_plain) + "\n")
    return EXIT_OK if passed else EXIT_FAIL


COMMANDS = {
    "generate": cmd_generate,
    "count": cmd_count,
    "paircorr": cmd_paircorr,
    "curve": cmd_curve,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.prime_cutoff = args.prime_cutoff or analytic.default_prime_cutoff()
        return COMMANDS[args.command](args)
    except (UsageError, FareyCorrError) as exc:
        print(f"fareycorr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
