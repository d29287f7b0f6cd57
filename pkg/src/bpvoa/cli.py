"""Command-line front end.

Every command prints a JSON report (or CSV rows with ``--format csv``) and
exits with 0 (verified), 1 (mismatch), 2 (usage error) or 3 (inconclusive).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction

from . import __version__, ope, weights
from .modules import (
    InconclusiveError,
    Kind,
    Truncation,
    TruncationError,
    iterate_quotient,
    null_vector_check,
    top_dimension,
    twist_module,
)
from .scalars import K, format_rational, format_scalar, parse_rational
from .verify import corrupted_engine, jacobi_suite, verify_all

EXIT = {"verified": 0, "mismatch": 1, "inconclusive": 3}


class UsageError(Exception):
    pass


def _odd_p(s: str) -> int:
    try:
        p = int(s)
        weights.Level(p)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an odd integer >= 3, got {s!r}") from None
    return p


def _rational(s: str) -> Fraction:
    try:
        return parse_rational(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected an exact rational 'a/b', got {s!r}") from None


def _nonneg(s: str) -> int:
    try:
        n = int(s)
    except ValueError:
        n = -1
    if n < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {s!r}")
    return n


def _verdict(ok) -> str:
    return {True: "verified", False: "mismatch", None: "inconclusive"}[ok]


def _label(args) -> weights.HighestWeight:
    if args.i is None or args.j is None:
        raise UsageError("--i and --j are required")
    try:
        weights.admissible_weight(args.i, args.j, args.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return weights.xi_chi(args.i, args.j, weights.Level(args.p).k)


# -- commands ------------------------------------------------------------------------


def cmd_brackets(args):
    grid = range(-args.grid, args.grid + 1)
    recs = ope.export_brackets(grid)
    rows = [
        {
            "lhs": f"[{r['lhs'][0][0]}_{r['lhs'][0][1]}, {r['lhs'][1][0]}_{r['lhs'][1][1]}]",
            "rhs_terms": " ".join(f"{t['coeff']}*{t['family']}_{t['index']}" for t in r["rhs_terms"]),
            "central": r["central"],
        }
        for r in recs
    ]
    return {"brackets": recs}, rows, True


def cmd_verify_brackets(args):
    grid = range(-args.grid, args.grid + 1)
    rep = ope.verify_bracket_table(grid, literal=args.literal)
    extra = {
        "virasoro": ope.check_virasoro(grid),
        "antisymmetry": ope.check_antisymmetry(grid),
        "grading": ope.check_grading(grid),
        "flow_automorphism": ope.check_flow_automorphism(grid),
    }
    results = rep.to_json()
    results["checks"] = {name: {"mismatches": len(v)} for name, v in extra.items()}
    results["flow_constants"] = {str(n): format_scalar(ope.ENGINE.flow_constant(n)) for n in grid}
    results["central_charge"] = format_scalar(ope.central_charge_expr())
    ok = rep.ok and not any(extra.values())
    rows = [{"check": "bracket-table", "checked": rep.checked, "mismatches": len(rep.mismatches)}]
    rows += [{"check": name, "checked": "", "mismatches": len(v)} for name, v in extra.items()]
    return results, rows, ok


def cmd_verify_jacobi(args):
    grid = range(-args.grid, args.grid + 1)
    r = jacobi_suite(grid, [args.k] if args.k is not None else None, seed=args.seed)
    rows = [{k: v for k, v in run.items() if k != "failures"} for run in r["runs"]]
    return r, rows, r["ok"]


def cmd_simples(args):
    recs = [rec.to_json() for rec in weights.enumerate_simples(args.p)]
    rows = [dict(r, **{"lambda": " ".join(r["lambda"])}) for r in recs]
    distinct = len({(r["xi"], r["chi"]) for r in recs}) == len(recs)
    return {"count": len(recs), "records": recs}, rows, distinct


def cmd_character(args):
    hw = _label(args)
    k = weights.Level(args.p).k
    trunc = Truncation(args.depth, args.charge if args.charge is not None else args.p)
    state = iterate_quotient(Kind.VERMA, hw, trunc, k)
    blocks = [{"charge": a, "depth": d, "dim": n} for (a, d), n in sorted(state.dimensions().items(), key=lambda t: (t[0][1], t[0][0]))]
    results = {"hw": hw.to_json(), "blocks": blocks, "fixpoint_iterations": state.iterations,
               "truncation": {"max_depth": trunc.max_depth, "charge_window": trunc.charge_window}}
    return results, blocks, True


def cmd_null_vector(args):
    trunc = None
    if args.depth is not None or args.charge is not None:
        n = args.p - 2
        d0 = n if args.family == "G+" else 2 * n
        trunc = Truncation(args.depth if args.depth is not None else d0,
                           args.charge if args.charge is not None else max(args.p, n))
    r = null_vector_check(args.p, args.family, trunc)
    row = {"monomial": r["monomial"], "in_maximal_submodule": r["in_maximal_submodule"],
           "certificate_depth": r["certificate_depth"], "fixpoint_iterations": r["fixpoint_iterations"]}
    return r, [row], r["in_maximal_submodule"]


def cmd_top_dims(args):
    k = weights.Level(args.p).k
    rows = []
    ok = True
    for rec in weights.enumerate_simples(args.p):
        trunc = Truncation(1, args.charge) if args.charge is not None else None
        try:
            t = top_dimension(rec.hw, k, trunc)
            status = "verified" if t == rec.i else "mismatch"
        except InconclusiveError:
            t, status = None, "inconclusive"
        if status == "mismatch":
            ok = False
        elif status == "inconclusive" and ok:
            ok = None
        rows.append({"i": rec.i, "j": rec.j, "xi": format_rational(rec.hw.xi), "chi": format_rational(rec.hw.chi),
                     "top_dimension": t, "status": status})
    return {"p": args.p, "records": rows}, rows, ok


def cmd_spectral_flow(args):
    hw = _label(args)
    k = weights.Level(args.p).k
    depth = args.depth if args.depth is not None else args.times + 1
    trunc = Truncation(depth, args.charge if args.charge is not None else args.p)
    state = iterate_quotient(Kind.VERMA, hw, trunc, k)
    expected = hw
    for _ in range(args.times):
        expected = weights.flow_weight(expected, top_dimension(expected, k), k)
    try:
        got, report = twist_module(state, args.times)
    except InconclusiveError as exc:
        results = {"hw": hw.to_json(), "expected": expected.to_json(), "reason": str(exc)}
        return results, [{"xi": "", "chi": "", "expected_xi": results["expected"]["xi"],
                          "expected_chi": results["expected"]["chi"]}], None
    results = {"hw": hw.to_json(), "twisted": got.to_json(), "expected": expected.to_json(), "vector": report}
    row = {"xi": results["twisted"]["xi"], "chi": results["twisted"]["chi"],
           "expected_xi": results["expected"]["xi"], "expected_chi": results["expected"]["chi"]}
    return results, [row], got == expected


def cmd_central_charge(args):
    if args.p is not None:
        k = weights.Level(args.p).k
        c = weights.central_charge(k, args.p)
        alt = Fraction(-4 * (args.p - 4) * (args.p - 3), args.p)
        results = {"p": args.p, "k": format_rational(k), "c": format_rational(c),
                   "closed_form_k": format_rational(c), "closed_form_p": format_rational(alt)}
        ok = c == alt
    elif args.k is not None:
        if args.k == -3:
            raise UsageError("k = -3 is the critical level")
        c = weights.central_charge(args.k)
        results = {"k": format_rational(args.k), "c": format_rational(c)}
        ok = True
    else:
        results = {"k": "k", "c": format_scalar(weights.central_charge(K))}
        ok = True
    return results, [results], ok


def cmd_verify(args):
    engine = corrupted_engine() if args.inject_fault else None
    checks = verify_all(args.profile, engine)
    states = [c.ok for c in checks]
    ok = False if False in states else (None if None in states else True)
    results = {"profile": args.profile, "fault_injected": args.inject_fault,
               "checks": [c.to_json() for c in checks],
               "failing": [c.name for c in checks if c.ok is False]}
    rows = [{"name": c.name, "verdict": c.verdict} for c in checks]
    return results, rows, ok


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bpvoa", description="Exact computations for the Bershadsky-Polyakov algebra.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--timing", action="store_true", help="include wall-clock seconds in the report")
        return sp

    sp = add("brackets", cmd_brackets, "export the derived bracket table")
    sp.add_argument("--grid", type=_nonneg, default=3)

    sp = add("verify-brackets", cmd_verify_brackets, "compare derived brackets with the closed-form list")
    sp.add_argument("--grid", type=_nonneg, default=3)
    sp.add_argument("--literal", action="store_true", help="use the m(m+1)/2 variant of the G+G- central term")

    sp = add("verify-jacobi", cmd_verify_jacobi, "check bracket soundness on module vectors")
    sp.add_argument("--grid", type=_nonneg, default=2)
    sp.add_argument("--k", type=_rational, default=None, help="single rational level instead of symbolic + 3 random")
    sp.add_argument("--seed", type=int, default=0)

    sp = add("simples", cmd_simples, "list simple modules at k = p/2 - 3")
    sp.add_argument("--p", type=_odd_p, required=True)

    sp = add("character", cmd_character, "graded dimensions of L(xi_ij, chi_ij) in a window")
    sp.add_argument("--p", type=_odd_p, required=True)
    sp.add_argument("--i", type=int)
    sp.add_argument("--j", type=int)
    sp.add_argument("--depth", type=_nonneg, default=2)
    sp.add_argument("--charge", type=_nonneg, default=None)

    sp = add("null-vector", cmd_null_vector, "membership of (G+_{-1})^(p-2)|0> in the maximal ideal")
    sp.add_argument("--p", type=_odd_p, required=True)
    sp.add_argument("--family", choices=("G+", "G-"), default="G+")
    sp.add_argument("--depth", type=_nonneg, default=None)
    sp.add_argument("--charge", type=_nonneg, default=None)

    sp = add("top-dims", cmd_top_dims, "top-space dimensions for every label")
    sp.add_argument("--p", type=_odd_p, required=True)
    sp.add_argument("--charge", type=_nonneg, default=None)

    sp = add("spectral-flow", cmd_spectral_flow, "twist L(xi_ij, chi_ij) by spectral flow")
    sp.add_argument("--p", type=_odd_p, required=True)
    sp.add_argument("--i", type=int)
    sp.add_argument("--j", type=int)
    sp.add_argument("--times", type=_nonneg, default=1)
    sp.add_argument("--depth", type=_nonneg, default=None)
    sp.add_argument("--charge", type=_nonneg, default=None)

    sp = add("central-charge", cmd_central_charge, "central charge at p, at k, or symbolically")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--p", type=_odd_p)
    g.add_argument("--k", type=_rational)

    sp = add("verify", cmd_verify, "run every consistency check")
    sp.add_argument("--profile", choices=("quick", "full"), default="quick")
    sp.add_argument("--inject-fault", action="store_true", help="corrupt the G+G- central term first")
    return parser


def _echo(args) -> dict:
    skip = {"func", "command", "format", "timing"}
    return {k: (format_rational(v) if isinstance(v, Fraction) else v) for k, v in sorted(vars(args).items()) if k not in skip}


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(r)
    return buf.getvalue()


def _glue_negative(argv: list[str]) -> list[str]:
    # argparse would read "--k -1/2" as two flags
    out = []
    i = 0
    while i < len(argv):
        if argv[i] == "--k" and i + 1 < len(argv) and argv[i + 1][:1] == "-" and argv[i + 1][1:2].isdigit():
            out.append(f"--k={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def run(argv: list[str] | None = None) -> tuple[int, str]:
    """Run the CLI; returns (exit code, text written to stdout)."""
    parser = build_parser()
    argv = _glue_negative(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), ""
    start = time.perf_counter()
    try:
        results, rows, ok = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"bpvoa {args.command}: error: {exc}", file=sys.stderr)
        return 2, ""
    except (TruncationError, InconclusiveError) as exc:
        results, rows, ok = {"reason": str(exc)}, [{"reason": str(exc)}], None
    verdict = _verdict(ok)
    if args.format == "csv":
        return EXIT[verdict], _csv(rows)
    report = {"command": args.command, "inputs": _echo(args), "results": results, "verdict": verdict}
    if args.timing:
        report["timing"] = round(time.perf_counter() - start, 3)
    return EXIT[verdict], json.dumps(report, sort_keys=True, indent=2) + "\n"


def main(argv: list[str] | None = None) -> int:
    code, out = run(argv)
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
