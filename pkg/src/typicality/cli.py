"""Command-line front end: ``typicality {tails,mi,series,mc,report}``.

Exit codes: 0 success, 2 argument error, 3 regime error, 4 strict or
acceptance failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .dims import SubsystemDims, TripartiteDims
from .errors import DomainError, RegimeError, TypicalityError
from .haar_mc import gellmann_basis, ks_critical_value, ks_statistic, mi_ensemble, run_ensemble
from .mutual_info import (bose_einstein_J_folded, mi_bernoulli_series, mi_closed_form,
                          mi_exact, mi_exact_rational, mi_leading, mi_naive_factorized,
                          optimal_truncation)
from .pclt import figure1_data, pk_moments, tail_comparison
from .spectral import (bloch_variance_prediction, dirichlet_cross_moment, dirichlet_plogp,
                       lubkin_purity, page_entropy)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_REGIME = 3
EXIT_FAIL = 4

DEFAULT_PRECISION = 12
DEFAULT_SEED = 0
SEED_ENV = "TYPICALITY_SEED"
STRICT_Z = 5.0


class UsageError(Exception):
    pass


@dataclass
class Section:
    title: str
    headers: list[str]
    rows: list[list]


@dataclass
class Emission:
    command: str
    inputs: dict
    outputs: dict
    sections: list[Section] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    exit_code: int = EXIT_OK


# ---------------------------------------------------------------- formatting

def _fmt(x, precision: int) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.{precision}g}"
    return str(x)


def _jsonable(x, precision: int):
    if isinstance(x, dict):
        return {str(k): _jsonable(v, precision) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v, precision) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v, precision) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.{precision}g}")
    return x


def render(em: Emission, fmt: str, precision: int) -> str:
    if fmt == "json":
        doc = {"command": em.command, "inputs": _jsonable(em.inputs, precision),
               "outputs": _jsonable(em.outputs, precision), "version": __version__}
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        headers = em.sections[0].headers
        writer.writerow(headers)
        for sec in em.sections:
            if sec.headers != headers:
                raise ValueError("CSV output needs a single column layout")
            for row in sec.rows:
                writer.writerow([_fmt(v, precision) for v in row])
        return buf.getvalue()
    lines = []
    for sec in em.sections:
        cells = [sec.headers] + [[_fmt(v, precision) for v in row] for row in sec.rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(sec.headers))]
        if sec.title:
            lines.append(f"# {sec.title}")
        for i, r in enumerate(cells):
            lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip())
            if i == 0:
                lines.append("  ".join("-" * w for w in widths))
        lines.append("")
    lines.extend(em.notes)
    return "\n".join(lines).rstrip("\n") + "\n"


def _warn(msg: str):
    print(f"warning: {msg}", file=sys.stderr)


# ---------------------------------------------------------------- commands

def cmd_tails(args) -> Emission:
    dims = SubsystemDims(args.ds, args.de)
    if not 0.0 < args.threshold <= 1.0:
        raise UsageError("--threshold must lie in (0, 1]")
    if args.grid_points < 2:
        raise UsageError("--grid-points must be at least 2")
    at = tail_comparison(dims, args.threshold)
    grid = figure1_data(dims, args.grid_points)
    headers = ["p", "exact_density", "gaussian_density", "exact_tail", "gaussian_tail"]

    def row(tc):
        return [tc.threshold, tc.exact_density, tc.gaussian_density, tc.exact_tail, tc.gaussian_tail]

    outputs = {
        "threshold": dict(zip(headers, row(at)),
                          density_ratio=at.density_ratio, tail_ratio=at.tail_ratio),
        "grid": [dict(zip(headers, row(tc))) for tc in grid],
    }
    em = Emission("tails", {"d_S": args.ds, "d_E": args.de, "threshold": args.threshold,
                            "grid_points": args.grid_points}, outputs,
                  [Section("threshold", headers, [row(at)]),
                   Section("grid", headers, [row(tc) for tc in grid])])
    p = args.precision
    em.notes.append(f"gaussian/exact density ratio at p={_fmt(at.threshold, p)}: "
                    f"{_fmt(at.density_ratio, p)}")
    em.notes.append(f"gaussian/exact tail ratio at p={_fmt(at.threshold, p)}: "
                    f"{_fmt(at.tail_ratio, p)}")
    return em


def _parse_method(text: str):
    if text in ("exact", "integral", "all"):
        return text, None
    if text.startswith("series:"):
        try:
            k = int(text.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad series order in --method {text!r}") from None
        if k < 0:
            raise UsageError("series order must be non-negative")
        return "series", k
    raise UsageError(f"unknown --method {text!r}; use exact, series:K, integral or all")


def cmd_mi(args) -> Emission:
    method, k = _parse_method(args.method)
    dims = TripartiteDims(args.da, args.db, args.de)
    dec = mi_exact(dims)
    rows = []
    outputs = {}
    label = "exact" if dims.page_regime else "swapped-regime exact value"
    if not dims.page_regime:
        _warn(f"d_A*d_B = {dims.d_A * dims.d_B} > d_E = {dims.d_E}: outside the page regime; "
              "reporting the swapped-regime exact value")
        if method in ("series", "integral"):
            raise RegimeError(f"--method {args.method} requires d_A*d_B <= d_E")

    exact_part = {
        "value": dec.total,
        "diagonal_mi": dec.diagonal_mi,
        "eigenvalue_correction": dec.eigenvalue_correction,
        "coherence_term": dec.coherence_term,
        "cartan_term": dec.cartan_term,
        "page_regime": dec.page_regime,
        "label": label,
    }
    outputs["exact"] = exact_part
    rows += [[label, dec.total], ["diagonal_mi", dec.diagonal_mi],
             ["eigenvalue_correction", dec.eigenvalue_correction],
             ["coherence_term", dec.coherence_term], ["cartan_term", dec.cartan_term]]
    if not dims.page_regime:
        naive = mi_naive_factorized(dims)
        outputs["naive_factorized"] = naive
        rows.append(["naive_factorized (invalid here)", naive])

    if dims.page_regime and method in ("series", "all"):
        ser = mi_bernoulli_series(dims, k) if k is not None else optimal_truncation(dims)
        outputs["series"] = {"order_k": ser.order_k, "value": ser.value,
                             "truncation_estimate": ser.truncation_estimate,
                             "delta_vs_exact": ser.value - dec.total}
        rows += [[f"series (k={ser.order_k})", ser.value],
                 ["series truncation estimate", ser.truncation_estimate]]
    if dims.page_regime and method in ("integral", "all"):
        cf = mi_closed_form(dims)
        j = bose_einstein_J_folded(dims)
        outputs["integral"] = {"value": cf.value, "abs_error_estimate": cf.abs_error_estimate,
                               "J": j.value, "delta_vs_exact": cf.value - dec.total}
        rows += [["integral", cf.value], ["integral error estimate", cf.abs_error_estimate],
                 ["J", j.value]]
    if dims.page_regime and method == "all":
        lead = mi_leading(dims)
        outputs["leading"] = lead
        rows.append(["leading", lead])
        rows += [["delta series-exact", outputs["series"]["delta_vs_exact"]],
                 ["delta integral-exact", outputs["integral"]["delta_vs_exact"]],
                 ["delta leading-exact", lead - dec.total]]
        outputs["deltas"] = {"series_minus_exact": outputs["series"]["delta_vs_exact"],
                             "integral_minus_exact": outputs["integral"]["delta_vs_exact"],
                             "leading_minus_exact": lead - dec.total}
    return Emission("mi", {"d_A": args.da, "d_B": args.db, "d_E": args.de,
                           "method": args.method}, outputs,
                    [Section("mutual information (nats)", ["quantity", "value"], rows)])


def cmd_series(args) -> Emission:
    dims = TripartiteDims(args.da, args.db, args.de)
    if not dims.page_regime:
        raise RegimeError("the 1/N series requires d_A*d_B <= d_E")
    if args.k_max < 0:
        raise UsageError("--k-max must be non-negative")
    ser = mi_bernoulli_series(dims, args.k_max)
    exact = mi_exact_rational(dims)
    partial = Fraction(ser.exact_value - sum(ser.exact_terms, Fraction(0)))
    rows = [[0, "+", "", float(partial), float(partial), float(abs(exact - partial))]]
    table = []
    for k, (coef, term) in enumerate(zip(ser.coefficients, ser.exact_terms), start=1):
        partial += term
        err = abs(exact - partial)
        rows.append([k, "-" if coef < 0 else "+", abs(coef), float(term), float(partial), float(err)])
        table.append({"k": k, "coefficient": str(coef), "term": float(term),
                      "partial_sum": float(partial), "abs_error": float(err)})
    opt = optimal_truncation(dims)
    outputs = {"exact": float(exact), "leading": ser.leading, "terms": table,
               "optimal_k": opt.order_k, "optimal_value": opt.value,
               "optimal_abs_error": float(abs(exact - opt.exact_value))}
    em = Emission("series", {"d_A": args.da, "d_B": args.db, "d_E": args.de,
                             "k_max": args.k_max}, outputs,
                  [Section("1/N series (nats)",
                           ["k", "sign", "coefficient", "term", "partial_sum", "abs_error"], rows)])
    em.notes.append(f"exact: {_fmt(float(exact), args.precision)}; optimal truncation at "
                    f"k={opt.order_k} with |error| {_fmt(outputs['optimal_abs_error'], args.precision)}")
    return em


def _zrow(name, measured, se, target):
    z = (measured - target) / se if se > 0 else (0.0 if measured == target else math.inf)
    return [name, float(measured), float(se), float(target), float(z)]


def cmd_mc(args) -> Emission:
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    headers = ["quantity", "measured", "stderr", "target", "z"]
    inputs = {"mode": args.mode, "samples": args.samples, "seed": args.seed,
              "workers": args.workers}
    rows = []
    extra = {}
    if args.mode == "mi":
        _need(args, "da", "db", "de")
        dims = TripartiteDims(args.da, args.db, args.de)
        inputs.update(d_A=args.da, d_B=args.db, d_E=args.de)
        r = mi_ensemble(dims, args.samples, args.seed, args.workers)
        rows.append(_zrow("mutual_information", r.mean_mi, r.stderr, mi_exact(dims).total))
    else:
        _need(args, "ds", "de")
        dims = SubsystemDims(args.ds, args.de)
        if dims.d_S < 2:
            raise UsageError("--ds must be at least 2 for Monte Carlo runs")
        inputs.update(d_S=args.ds, d_E=args.de)
        st = run_ensemble(dims, args.samples, args.seed, args.workers)
        if args.mode == "subsystem":
            ent = page_entropy(dims.d_S, dims.d_E) if dims.d_S <= dims.d_E else None
            rows.append(_zrow("mean_P1", st.pk.mean[0], st.pk.stderr[0], pk_moments(dims).mean))
            rows.append(_zrow("purity", st.purity.mean, st.purity.stderr,
                              lubkin_purity(dims).total))
            if ent is not None:
                rows.append(_zrow("von_neumann", st.von_neumann.mean, st.von_neumann.stderr,
                                  ent.von_neumann))
                rows.append(_zrow("diagonal_entropy", st.diagonal.mean, st.diagonal.stderr,
                                  ent.diagonal_entropy))
            rows.append(_zrow("P1_ln_P1", st.pk_logpk.mean[0], st.pk_logpk.stderr[0],
                              dirichlet_plogp(dims)))
            if dims.N >= 2:
                rows.append(_zrow("cross_moment", st.cross_moment.mean, st.cross_moment.stderr,
                                  dirichlet_cross_moment(dims.N)))
            extra["majorization_violations"] = st.majorization_violations
            if st.count >= 1000:
                extra["ks_P1"] = ks_statistic(st, dims)
                extra["ks_critical_1pct"] = ks_critical_value(st.count)
        else:
            basis = gellmann_basis(dims.d_S)
            target = bloch_variance_prediction(dims.d_S, dims.N).per_generator
            for a in range(basis.generators.shape[0]):
                family = "cartan" if a >= basis.offdiag_count else "offdiag"
                rows.append(_zrow(f"var_r{a + 1}_{family}", st.bloch.variance[a],
                                  st.bloch_sq.stderr[a], target))
            rows.append(_zrow("cartan_minus_offdiag", st.family_gap.mean,
                              st.family_gap.stderr, 0.0))
    outputs = {"rows": [dict(zip(headers, r)) for r in rows], **extra}
    em = Emission("mc", inputs, outputs, [Section(f"Monte Carlo: {args.mode}", headers, rows)])
    for k, v in extra.items():
        em.notes.append(f"{k}: {_fmt(v, args.precision)}")
    worst = max((abs(r[4]) for r in rows), default=0.0)
    if args.strict and (worst > STRICT_Z or extra.get("majorization_violations", 0) > 0):
        em.exit_code = EXIT_FAIL
    return em


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"mode {args.mode} requires {', '.join(missing)}")


def _bad_bernoulli(k_max: int):
    from .special_fn import bernoulli_even_unbounded

    table = list(bernoulli_even_unbounded(k_max))
    table[0] = Fraction(1, 5)
    return table


def cmd_report(args) -> Emission:
    from .report import run_report

    results = run_report(seed=args.seed, workers=args.workers,
                         bernoulli=_bad_bernoulli if args.inject_bad_bernoulli else None)
    rows = [[r.number, r.title, "PASS" if r.passed else "FAIL", r.seconds] for r in results]
    outputs = {"results": [{"criterion": r.number, "title": r.title, "passed": r.passed,
                            "measured": r.measured, "expected": r.expected,
                            "seconds": r.seconds} for r in results],
               "all_passed": all(r.passed for r in results)}
    em = Emission("report", {"seed": args.seed, "workers": args.workers}, outputs,
                  [Section("acceptance battery", ["criterion", "title", "status", "seconds"], rows)])
    for r in results:
        if not r.passed:
            em.notes.append(f"criterion {r.number} measured {r.measured} expected {r.expected}")
    if not outputs["all_passed"]:
        em.exit_code = EXIT_FAIL
    return em


# ---------------------------------------------------------------- parser

def _precision(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("precision must be an integer") from None
    if not 3 <= p <= 17:
        raise argparse.ArgumentTypeError("precision must lie in [3, 17]")
    return p


def _seed(text: str) -> int:
    try:
        s = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError("seed must be a decimal integer") from None
    if not 0 <= s < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return s


def _default_seed() -> int:
    text = os.environ.get(SEED_ENV)
    if text is None or text.strip() == "":
        return DEFAULT_SEED
    try:
        return _seed(text.strip())
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"{SEED_ENV}: {exc}") from None


def build_parser(default_seed: int = DEFAULT_SEED) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="typicality",
                                     description="Typicality of Haar-random pure states.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--format", choices=("table", "csv", "json"), default="table")
    out.add_argument("--json", dest="format", action="store_const", const="json",
                     help="shorthand for --format json")
    out.add_argument("--output", metavar="PATH", help="write to PATH instead of stdout")
    out.add_argument("--precision", type=_precision, default=DEFAULT_PRECISION,
                     help="significant digits, 3..17 (default 12)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tails", parents=[out], help="exact vs Gaussian tails of P_k")
    p.add_argument("--ds", type=int, required=True)
    p.add_argument("--de", type=int, required=True)
    p.add_argument("--threshold", type=float, default=0.95)
    p.add_argument("--grid-points", type=int, default=211)
    p.set_defaults(func=cmd_tails)

    p = sub.add_parser("mi", parents=[out], help="typical mutual information")
    p.add_argument("--da", type=int, required=True)
    p.add_argument("--db", type=int, required=True)
    p.add_argument("--de", type=int, required=True)
    p.add_argument("--method", default="exact", help="exact | series:K | integral | all")
    p.set_defaults(func=cmd_mi)

    p = sub.add_parser("series", parents=[out], help="term table of the 1/N series")
    p.add_argument("--da", type=int, required=True)
    p.add_argument("--db", type=int, required=True)
    p.add_argument("--de", type=int, required=True)
    p.add_argument("--k-max", type=int, default=5)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("mc", parents=[out], help="Monte Carlo check against analytic targets")
    p.add_argument("--mode", choices=("subsystem", "mi", "bloch"), default="subsystem")
    for flag in ("--ds", "--de", "--da", "--db"):
        p.add_argument(flag, type=int)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=_seed, default=default_seed)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--strict", action="store_true", help="exit 4 if any |z| > 5")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("report", parents=[out], help="run the acceptance battery")
    p.add_argument("--seed", type=_seed, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--inject-bad-bernoulli", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        parser = build_parser(_default_seed())
    except UsageError as exc:
        print(f"typicality: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if args.command == "report" and args.seed is None:
        from .report import REPORT_SEED

        args.seed = REPORT_SEED
    try:
        em = args.func(args)
    except RegimeError as exc:
        print(f"typicality: regime error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (UsageError, DomainError) as exc:
        parser.print_usage(sys.stderr)
        print(f"typicality: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TypicalityError as exc:
        print(f"typicality: error: {exc}", file=sys.stderr)
        return 1
    text = render(em, args.format, args.precision)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return em.exit_code


if __name__ == "__main__":
    sys.exit(main())
