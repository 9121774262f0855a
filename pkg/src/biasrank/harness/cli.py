"""Command line interface.

Every verb produces one or more CheckReports, printed as a report document
(JSON or text).  Exit codes: 0 pass, 1 violation, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from ..charsum import bias_report, level_counts, squared_modulus
from ..gfcore import DEFAULT_BUDGET, BudgetError, Subspace, UsageError, check_prime
from ..poly import Polynomial, degree, iterated_derivative
from ..quadfamily import QuadFamily, admissible, admissible_density, regularity, regularize, zero_set
from ..quadform import QuadraticPoly, gram_rank, schmidt_rank
from ..sumset import GroupSubset, bogolyubov_search, rep_counts
from .checks import FAIL, PASS, CheckReport, _Timer, implication_check
from .generators import SplitMix64, random_subset, random_subspace, structured_quartic
from .oracles import bounded_schmidt_rank
from .pipeline import DEFAULT_CAP, derivative_extract, pipeline
from .plotting import render_figures
from .report import build_report, dumps, render_text, write_report
from .suite import exit_code, verify_suite

# --------------------------------------------------------------------------
# argument parsing


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    def d(value):
        return argparse.SUPPRESS if suppress else value

    g = parser.add_argument_group("global options")
    g.add_argument("--p", type=int, default=d(5), help="field size (prime, default 5)")
    g.add_argument("--n", type=int, default=d(None), help="number of variables (inferred from polynomials if omitted)")
    g.add_argument("--seed", type=int, default=d(0), help="seed for generated inputs (default 0)")
    g.add_argument("--budget", type=int, default=d(DEFAULT_BUDGET), help="enumeration budget")
    g.add_argument("--report", default=d(None), metavar="PATH", help="also write the JSON report to PATH")
    g.add_argument("--format", choices=["json", "text"], default=d("json"))
    g.add_argument("--figures", default=d(None), metavar="DIR", help="render figures into DIR")


def _vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.replace(" ", "").split(",") if v != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated vector: {text!r}") from None


def _vectors(text: str) -> list[tuple[int, ...]]:
    return [_vector(part) for part in text.split(";") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="biasrank", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="verb", required=True)

    def verb(name, help_text, parents=(common,), **kw):
        return sub.add_parser(name, help=help_text, parents=list(parents), **kw)

    def poly_arg(sp, required=True):
        sp.add_argument("--poly", required=required, help='polynomial, e.g. "x1*x2 + 3*x3^2"')

    def family_args(sp, required=True):
        sp.add_argument("--quad", action="append", default=[], required=required, help="family member (repeatable)")
        sp.add_argument("--basis", type=_vectors, default=None, help='subspace basis "1,0,0;0,1,0" (default: all of F_p^n)')

    sp = verb("bias", "bias of a polynomial from exact level counts")
    poly_arg(sp)
    sp.add_argument("--m", type=int, default=None, help="exactly test bias == p^(-m/2) (default: Gram rank for quadratics)")

    sp = verb("rank", "Schmidt rank: certificate for quadratics, bounded search otherwise")
    poly_arg(sp)
    sp.add_argument("--cap", type=int, default=3)

    sp = verb("derive", "iterated discrete derivative")
    poly_arg(sp)
    sp.add_argument("--h", type=_vector, action="append", default=[], help="direction (repeatable)")

    sp = verb("family", "regularity of a family of quadratics")
    fam_sub = sp.add_subparsers(dest="action", required=True)
    for action, text in (("check", "compute regularity"), ("regularize", "make the family R-regular")):
        a = fam_sub.add_parser(action, help=text, parents=[common])
        family_args(a)
        a.add_argument("--R", type=int, default=None if action == "check" else 2)

    sp = verb("zeroset", "common zeros of a family")
    family_args(sp)
    sp.add_argument("--list", action="store_true", help="include the points")

    sp = verb("admissible", "admissible tuples and their density")
    family_args(sp, required=False)
    sp.add_argument("--h", type=_vector, action="append", default=[], help="tuple member (repeatable); omit for density mode")
    sp.add_argument("--mu", type=float, default=0.5, help="density of the seeded set F")
    sp.add_argument("--codim", type=int, default=0, help="codimension of the seeded subspace W")

    sp = verb("sumset", "representation counts and Bogolyubov subspaces")
    ss = sp.add_subparsers(dest="action", required=True)
    for action, text in (("reps", "representation counts r_b"), ("bogolyubov", "search for a subspace in bE - bE")):
        a = ss.add_parser(action, help=text, parents=[common])
        a.add_argument("--points", type=_vectors, default=None, help='explicit set "1,0,0;0,2,1"')
        a.add_argument("--mu", type=float, default=0.3, help="density of a seeded random set when --points is absent")
        if action == "reps":
            a.add_argument("--b", type=int, default=1)
        else:
            a.add_argument("--max-b", type=int, default=3)
            a.add_argument("--max-codim", type=int, default=3)

    sp = verb("extract", "quadratic pool from derivative presentations")
    poly_arg(sp)
    sp.add_argument("--basis", type=_vectors, default=None)
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP)

    sp = verb("check-implication", "verify that the family's zeros kill the quartic part")
    poly_arg(sp)
    family_args(sp, required=False)

    sp = verb("pipeline", "extract, regularize and verify")
    poly_arg(sp, required=False)
    sp.add_argument("--structured", type=int, default=None, metavar="K", help="use a seeded structured quartic with K products")
    sp.add_argument("--basis", type=_vectors, default=None)
    sp.add_argument("--R", type=int, default=1)
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP)

    sp = verb("verify", "run the acceptance suite")
    sp.add_argument("--criteria", default=None, help="comma-separated criterion numbers or names (default all)")
    sp.add_argument("--mutation", action="append", default=[], help="inject a known defect (harness self-test)")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--config", default=None, metavar="FILE", help="JSON suite config; {} runs nothing")
    return parser


# --------------------------------------------------------------------------
# helpers


def _infer_n(args, texts) -> int:
    if args.n is not None:
        return args.n
    idx = [int(m) for t in texts if t for m in re.findall(r"x(\d+)", t)]
    if not idx:
        raise UsageError("cannot infer n; pass --n")
    return max(idx)


def _poly(args, text: str, n: int) -> Polynomial:
    return Polynomial.parse(text, args.p, n)


def _space(args, n: int) -> Subspace:
    basis = getattr(args, "basis", None)
    if not basis:
        return Subspace.full(args.p, n)
    if any(len(v) != n for v in basis):
        raise UsageError("basis vectors must have length n")
    return Subspace.span(args.p, n, basis)


def _family(args) -> tuple[QuadFamily, int]:
    n = _infer_n(args, args.quad)
    V = _space(args, n)
    return QuadFamily.of(args.quad, args.p, n, V), n


def _subset(args, n: int) -> GroupSubset:
    if args.points:
        return GroupSubset.from_points(args.p, n, args.points)
    return random_subset(SplitMix64(args.seed), args.p, n, args.mu)


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


# --------------------------------------------------------------------------
# verbs


def cmd_bias(args):
    n = _infer_n(args, [args.poly])
    f = _poly(args, args.poly, n)
    with _Timer() as t:
        m = args.m
        if m is None and degree(f) <= 2:
            m = gram_rank(QuadraticPoly.from_poly(f))
        out = bias_report(f, m, budget=args.budget)
        counts = level_counts(f, budget=args.budget)
    ok = out.get("exact_power_check", {}).get("holds", True) or _zero_bias(counts)
    stats = dict(out, zero=_zero_bias(counts))
    rep = CheckReport("bias", _status(ok), {"p": f.p, "n": n, "poly": str(f), "m": m}, stats, [] if ok else [stats], t.elapsed)
    rep.series = {"level_counts": list(counts.counts), "p": f.p}
    return [rep]


def _zero_bias(counts) -> bool:
    return squared_modulus(counts) == 0


def cmd_rank(args):
    n = _infer_n(args, [args.poly])
    f = _poly(args, args.poly, n)
    if degree(f) >= f.p:
        raise UsageError("rank search needs degree below p")
    with _Timer() as t:
        probe = bounded_schmidt_rank(f, args.cap, budget=args.budget) if 2 <= degree(f) < f.p else None
        cert = schmidt_rank(QuadraticPoly.from_poly(f)) if degree(f) == 2 else None
    stats = {"degree": degree(f), "search": probe.to_json() if probe else None, "certificate": cert.to_json() if cert else None}
    ok = not (cert and probe and probe.resolved and probe.result != cert.schmidt_rank)
    if cert is None and probe is None:
        stats["rank"] = 0 if degree(f) <= 1 else None
    return [CheckReport("rank", _status(ok), {"p": f.p, "n": n, "poly": str(f), "cap": args.cap}, stats, [] if ok else [stats], t.elapsed)]


def cmd_derive(args):
    n = _infer_n(args, [args.poly])
    f = _poly(args, args.poly, n)
    if any(len(h) != n for h in args.h):
        raise UsageError("directions must have length n")
    with _Timer() as t:
        g = iterated_derivative(f, args.h)
    params = {"p": f.p, "n": n, "poly": str(f), "directions": [list(h) for h in args.h]}
    return [CheckReport("derive", PASS, params, {"derivative": str(g), "degree": degree(g)}, [], t.elapsed)]


def cmd_family(args):
    fam, n = _family(args)
    params = {"p": fam.p, "n": n, "family": [str(q) for q in fam.polys()], "V": fam.ambient.to_json(), "R": args.R}
    with _Timer() as t:
        if args.action == "check":
            reg = regularity(fam, args.budget)
            ok = args.R is None or reg.value >= args.R
            stats = reg.to_json()
        else:
            res = regularize(fam, args.R, budget=args.budget)
            ok = res.regularity.value >= args.R
            stats = {
                "family": [str(q) for q in res.family.polys()],
                "N": res.family.N,
                "V": res.subspace.to_json(),
                "codim": res.subspace.codim,
                "regularity": res.regularity.to_json(),
                "steps": [s.to_json() for s in res.steps],
            }
    return [CheckReport(f"family-{args.action}", _status(ok), params, stats, [] if ok else [stats], t.elapsed)]


def cmd_zeroset(args):
    fam, n = _family(args)
    with _Timer() as t:
        X = zero_set(fam, budget=args.budget)
    stats = {"size": len(X), "ambient_size": len(fam.ambient)}
    if args.list:
        stats["points"] = [list(x) for x in X.points()]
    return [CheckReport("zeroset", PASS, {"p": fam.p, "n": n, "family": [str(q) for q in fam.polys()]}, stats, [], t.elapsed)]


def cmd_admissible(args):
    if not args.quad and args.n is None:
        raise UsageError("pass --quad or --n")
    fam, n = _family(args)
    params = {"p": fam.p, "n": n, "family": [str(q) for q in fam.polys()]}
    if args.h:
        if any(len(h) != n for h in args.h):
            raise UsageError("directions must have length n")
        with _Timer() as t:
            ok = admissible(args.h, fam)
        return [CheckReport("admissible", PASS, dict(params, h=[list(h) for h in args.h]), {"admissible": ok}, [], t.elapsed)]
    with _Timer() as t:
        rng = SplitMix64(args.seed)
        W = random_subspace(rng, fam.p, n, args.codim)
        E = random_subset(rng, fam.p, n, args.mu)
        if not W.is_subspace_of(fam.ambient):
            raise UsageError("density mode needs the full space as ambient")
        res = admissible_density(E, W, fam, args.budget)
    params.update(mu=E.density, W=W.to_json(), seed=args.seed)
    stats = res.to_json()
    return [CheckReport("admissible-density", _status(res.holds), params, stats, [] if res.holds else [stats], t.elapsed)]


def cmd_sumset(args):
    if args.n is None:
        raise UsageError("sumset needs --n")
    check_prime(args.p)
    E = _subset(args, args.n)
    if E.size == 0:
        raise UsageError("the set is empty")
    params = {"p": args.p, "n": args.n, "size": E.size, "seed": None if args.points else args.seed}
    with _Timer() as t:
        if args.action == "reps":
            prof = rep_counts(E, args.b, args.budget)
            vals = [int(c) for c in prof.counts]
            stats = {"b": args.b, "support": len(prof.support), "min": min(vals), "max": max(vals), "at_zero": vals[0]}
            rep = CheckReport("sumset-reps", PASS, params, stats, [], 0.0)
            rep.series = {"rep_counts": prof.counts, "b": args.b}
        else:
            res = bogolyubov_search(E, args.max_b, args.max_codim, args.budget)
            if res is None:
                stats = {"found": False}
                rep = CheckReport("bogolyubov", FAIL, params, stats, [{"reason": "no subspace found within the limits"}], 0.0)
            else:
                rep = CheckReport("bogolyubov", PASS, params, dict(res.to_json(), found=True), [], 0.0)
    rep.elapsed = t.elapsed
    return [rep]


def cmd_extract(args):
    n = _infer_n(args, [args.poly])
    f = _poly(args, args.poly, n)
    V = _space(args, n)
    with _Timer() as t:
        ext = derivative_extract(f, V, args.cap, seed=args.seed, budget=args.budget)
    stats = {k: v for k, v in ext.to_json().items() if k != "presentations"}
    stats["presentation_ranks"] = [pr.s for pr in ext.presentations]
    status = PASS if ext.euler_condition else FAIL
    return [CheckReport("extract", status, {"p": f.p, "n": n, "poly": str(f), "cap": args.cap}, stats, [], t.elapsed)]


def cmd_check_implication(args):
    n = _infer_n(args, [args.poly] + args.quad)
    f = _poly(args, args.poly, n)
    V = _space(args, n)
    fam = QuadFamily.of(args.quad, args.p, n, V)
    return [implication_check(f, fam, V, args.budget)]


def cmd_pipeline(args):
    if args.structured is not None:
        n = 4 if args.n is None else args.n
        f = structured_quartic(SplitMix64(args.seed), args.p, n, args.structured).poly
    elif args.poly:
        n = _infer_n(args, [args.poly])
        f = _poly(args, args.poly, n)
    else:
        raise UsageError("pass --poly or --structured K")
    if degree(f) > 4:
        raise UsageError("pipeline needs degree <= 4")
    rep = pipeline(f, R=args.R, cap=args.cap, V=_space(args, n), seed=args.seed, budget=args.budget)
    rep.stats["family"] = [str(q) for q in rep.family.polys()]
    rep.stats["V_out"] = rep.subspace.to_json()
    return [rep]


def cmd_verify(args):
    config = None
    if args.config:
        try:
            config = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config: {e}") from None
    if args.criteria is not None or args.mutation or args.jobs != 1 or args.seed:
        config = dict(config or {"criteria": list(range(1, 11))})
        if args.criteria is not None:
            config["criteria"] = [c.strip() for c in args.criteria.split(",") if c.strip()]
        if args.mutation:
            config["mutations"] = args.mutation
        if args.jobs != 1:
            config["jobs"] = args.jobs
        if args.seed:
            config["seed"] = args.seed
    reports, _ = verify_suite(config)
    return reports


COMMANDS = {
    "bias": cmd_bias,
    "rank": cmd_rank,
    "derive": cmd_derive,
    "family": cmd_family,
    "zeroset": cmd_zeroset,
    "admissible": cmd_admissible,
    "sumset": cmd_sumset,
    "extract": cmd_extract,
    "check-implication": cmd_check_implication,
    "pipeline": cmd_pipeline,
    "verify": cmd_verify,
}

REPORT_ONLY = {"report", "format", "figures"}


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in REPORT_ONLY}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        check_prime(args.p)
        reports = COMMANDS[args.verb](args)
    except (UsageError, BudgetError) as e:
        print(f"biasrank: error: {e}", file=sys.stderr)
        return 2
    doc = build_report(_config(args), reports)
    print(dumps(doc) if args.format == "json" else render_text(doc))
    if args.report:
        write_report(args.report, doc)
    if args.figures:
        render_figures(doc, reports, args.figures)
    return exit_code(reports)


if __name__ == "__main__":
    raise SystemExit(main())
