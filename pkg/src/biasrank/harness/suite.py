"""The acceptance suite: ten seeded, exhaustively verified criteria.

``verify_suite(None)`` runs everything with the default configuration;
``verify_suite({})`` runs nothing.  A configuration is a plain dict::

    {"criteria": [1, 5, 9], "seed": 0, "mutations": [], "jobs": 1}

Mutations deliberately break one ingredient so the harness can be seen to
catch it (exit code 1 with a witness).
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

from ..charsum import bias
from ..gfcore import Subspace, UsageError, indices_of, points_array
from ..poly import to_table
from ..quadfamily import (
    QuadFamily,
    admissible_density,
    affine_counting_check,
    codim_one_affine_subspaces,
    regularity,
    zero_set,
)
from ..quadform import QuadraticPoly, gram_rank
from ..sumset import bogolyubov_search, rep_counts_fft
from .checks import (
    FAIL,
    CheckReport,
    _status,
    _Timer,
    aggregate,
    gauss_sum_law_check,
    implication_check,
    restriction_rank_check,
    rank_formula_vs_bruteforce,
    taylor_check,
    rank_bias_scan,
)
from .generators import (
    SplitMix64,
    random_poly,
    random_quadratic_form,
    random_subset,
    random_subspace,
    structured_quartic,
)
from .pipeline import pipeline

DEFAULT_CONFIG = {"criteria": list(range(1, 11)), "seed": 0, "mutations": [], "jobs": 1}
CONFIG_KEYS = set(DEFAULT_CONFIG)


def _half_gram_rank(f) -> int:
    m = gram_rank(QuadraticPoly.from_poly(f))
    return (m + 1) // 2


def _gram_rank_plus_one(f) -> int:
    return gram_rank(QuadraticPoly.from_poly(f)) + 1


MUTATIONS = {
    # rank = ceil(m/2) ignores the Witt type
    "broken-schmidt-formula": "rank formula that ignores the Witt type",
    # bias claimed to be p^(-(m+1)/2)
    "broken-gauss-exponent": "Gauss-sum exponent off by one",
    # rank claimed one above the Gram rank
    "broken-rank-bound": "certificate rank reported as m + 1",
    # the implication is re-checked against the empty family
    "empty-family": "implication re-check drops the extracted family",
}


@dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    run: Callable[[int, frozenset], CheckReport]


# --------------------------------------------------------------------------
# the criteria


def _gauss_corpus():
    return [(5, 2, None), (3, 3, 10_000), (7, 3, 10_000)]


def criterion_1(seed: int, mutations: frozenset) -> CheckReport:
    fn = (lambda f: gram_rank(QuadraticPoly.from_poly(f)) + 1) if "broken-gauss-exponent" in mutations else None
    subs = [gauss_sum_law_check(p, n, count, seed, exponent_fn=fn) for p, n, count in _gauss_corpus()]
    extra = {"polys": sum(r.params["count"] for r in subs), "violations": sum(r.stats["violations"] for r in subs)}
    return aggregate("gauss-sum-law", subs, {"corpus": [list(c) for c in _gauss_corpus()], "seed": seed}, extra)


def criterion_2(seed: int, mutations: frozenset) -> CheckReport:
    fn = None
    if "broken-rank-bound" in mutations:
        fn = _gram_rank_plus_one
    elif "broken-schmidt-formula" in mutations:
        fn = _half_gram_rank
    subs = [rank_bias_scan(p, n, count, seed, rank_fn=fn) for p, n, count in _gauss_corpus()]
    extra = {"checked": sum(r.stats["checked"] for r in subs)}
    return aggregate("rank-vs-bias", subs, {"corpus": [list(c) for c in _gauss_corpus()], "seed": seed}, extra)


def criterion_3(seed: int, mutations: frozenset) -> CheckReport:
    fn = _half_gram_rank if "broken-schmidt-formula" in mutations else None
    subs = [rank_formula_vs_bruteforce(p, 2, 3, rank_fn=fn) for p in (3, 5)]
    extra = {"polys": sum(r.stats["polys"] for r in subs), "disagreements": sum(r.stats["disagreements"] for r in subs)}
    return aggregate("rank-formula-vs-search", subs, {"p": [3, 5], "n": 2, "cap": 3}, extra)


def criterion_4(seed: int, mutations: frozenset) -> CheckReport:
    subs = []
    for i in range(200):
        rng = SplitMix64(seed * 1_000_003 + 4000 + i)
        f = random_poly(rng, 5, 2, 3)
        V = random_subspace(rng, 5, 2, 1)
        subs.append(restriction_rank_check(f, V, cap=2))
    skipped = sum(r.status == "skipped" for r in subs)
    extra = {"resolved": len(subs) - skipped, "skip_rate": skipped / len(subs)}
    return aggregate("restriction-rank", subs, {"p": 5, "n": 2, "cubics": 200, "cap": 2, "seed": seed}, extra)


def criterion_5(seed: int, mutations: frozenset) -> CheckReport:
    with _Timer() as t:
        fam = QuadFamily.of(["x1*x2 + x3*x4"], 5, 4)
        reg = regularity(fam)
        X = zero_set(fam)
        results = [affine_counting_check(A, fam, reg.value) for A in codim_one_affine_subspaces(fam.ambient)]
    bad = [r for r in results if not r.holds]
    devs = [float(r.deviation) for r in results]
    worst = max(results, key=lambda r: r.deviation)
    report = CheckReport(
        "affine-counting",
        _status(not bad and reg.value == 2 and len(X) == 145 and len(results) == 780),
        {"p": 5, "n": 4, "family": ["x1*x2 + x3*x4"]},
        {
            "regularity": reg.value,
            "zero_set": len(X),
            "hyperplanes": len(results),
            "max_deviation": str(worst.deviation),
            "max_deviation_float": float(worst.deviation),
            "bound_float": 5 ** (-reg.value / 2),
        },
        [r.to_json() for r in bad[:5]],
        t.elapsed,
    )
    report.series = {"deviations": devs, "bound": 5 ** (-reg.value / 2)}
    return report


def criterion_6(seed: int, mutations: frozenset) -> CheckReport:
    subs = []
    for i in range(20):
        rng = SplitMix64(seed * 1_000_003 + 6000 + i)
        n, N, r = 3 + i % 2, i % 3, (i // 3) % 3
        mu = 0.2 + 0.6 * rng.below(1001) / 1000
        fam = QuadFamily(tuple(random_quadratic_form(rng, 5, n) for _ in range(N)), Subspace.full(5, n))
        W = random_subspace(rng, 5, n, r)
        E = random_subset(rng, 5, n, mu)
        with _Timer() as t:
            res = admissible_density(E, W, fam)
        params = {"n": n, "N": N, "r": r, "mu": E.density, "family": [str(q) for q in fam.polys()], "W": W.to_json()}
        subs.append(CheckReport("admissible-density", _status(res.holds), params, res.to_json(), [] if res.holds else [res.to_json()], t.elapsed))
    return aggregate("admissible-density", subs, {"p": 5, "configs": 20, "seed": seed})


def _bogolyubov_group(p: int, n: int, seed: int):
    found, unverified, rows = 0, [], []
    for i in range(50):
        rng = SplitMix64(seed * 1_000_003 + 7000 + 100 * p + i)
        mu = 0.2 + 0.4 * rng.below(1001) / 1000
        E = random_subset(rng, p, n, mu)
        res = bogolyubov_search(E, max_b=3, max_codim=3)
        if res is None:
            rows.append({"seed": i, "mu": E.density, "found": False})
            continue
        found += 1
        # independent recount through the float transform, rounded
        counts, gap = rep_counts_fft(E, res.b)
        idx = indices_of(points_array(res.U), p)
        fft_min = int(counts[idx].min())
        ok = gap < 0.25 and res.min_reps > 0 and fft_min == res.min_reps
        rows.append({"seed": i, "mu": E.density, "found": True, "b": res.b, "codim": res.U.codim, "min_reps": res.min_reps})
        if not ok:
            unverified.append({"seed": i, "result": res.to_json(), "fft_min": fft_min, "gap": gap})
    return found, unverified, rows


def criterion_7(seed: int, mutations: frozenset) -> CheckReport:
    stats, witnesses = {}, []
    ok = True
    with _Timer() as t:
        for p, n in ((5, 3), (3, 4)):
            found, unverified, rows = _bogolyubov_group(p, n, seed)
            key = f"F{p}^{n}"
            stats[key] = {
                "seeds": len(rows),
                "success_rate": found / len(rows),
                "verified": found - len(unverified),
                "max_b": max((r["b"] for r in rows if r["found"]), default=None),
                "max_codim": max((r["codim"] for r in rows if r["found"]), default=None),
            }
            ok &= found >= 0.9 * len(rows) and not unverified
            witnesses += unverified[:3]
            if found < 0.9 * len(rows):
                witnesses.append({"group": key, "misses": [r for r in rows if not r["found"]][:5]})
    return CheckReport("bogolyubov", _status(ok), {"max_b": 3, "max_codim": 3, "seed": seed}, stats, witnesses, t.elapsed)


def criterion_8(seed: int, mutations: frozenset) -> CheckReport:
    subs = []
    for i in range(100):
        rng = SplitMix64(seed * 1_000_003 + 8000 + i)
        subs.append(taylor_check(random_poly(rng, 5, 1 + i % 3, 4)))
    return aggregate("quartic-taylor", subs, {"p": 5, "polys": 100, "n": [1, 2, 3], "seed": seed})


def criterion_9(seed: int, mutations: frozenset) -> CheckReport:
    subs = []
    R = 1
    for i in range(20):
        k = 1 if i < 10 else 2
        sq = structured_quartic(SplitMix64(seed * 1_000_003 + 9000 + i), 5, 4, k)
        rep = pipeline(sq.poly, R=R, seed=i)
        fam = QuadFamily(() if "empty-family" in mutations else rep.family.quads, rep.subspace)
        recheck = implication_check(sq.poly, fam, rep.subspace)
        N, codim = rep.stats["N"], rep.stats["codim"]
        ok = rep.passed and recheck.passed and N <= 2 * k and codim <= 2 * k * R and recheck.stats["points"] == len(rep.subspace)
        wit = [] if ok else [{"pipeline": rep.stats, "recheck": recheck.stats, "witnesses": rep.witnesses + recheck.witnesses}]
        stats = dict(rep.stats, k=k, recheck_points=recheck.stats["points"], family=[str(q) for q in rep.family.polys()])
        subs.append(CheckReport("pipeline", _status(ok), dict(rep.params, k=k), stats, wit, rep.elapsed + recheck.elapsed))
    extra = {
        "max_N_k1": max(r.stats["N"] for r in subs[:10]),
        "max_N_k2": max(r.stats["N"] for r in subs[10:]),
        "max_codim": max(r.stats["codim"] for r in subs),
    }
    return aggregate("end-to-end", subs, {"p": 5, "n": 4, "R": R, "quartics": 20, "seed": seed}, extra)


def criterion_10(seed: int, mutations: frozenset) -> CheckReport:
    f = random_poly(SplitMix64(seed * 1_000_003 + 10_000), 5, 7, 4)
    start = time.perf_counter()
    b = bias(f)
    elapsed = time.perf_counter() - start
    start = time.perf_counter()
    table = to_table(f)
    table_s = time.perf_counter() - start
    pts = 5**7
    report = CheckReport(
        "performance",
        _status(elapsed < 1.0),
        {"p": 5, "n": 7, "degree": 4, "seed": seed},
        {"points": pts, "bias": round(b, 12), "limit_s": 1.0, "table_size": int(table.values.size)},
        [] if elapsed < 1.0 else [{"bias_s": elapsed}],
        elapsed + table_s,
    )
    report.timing = {"bias_s": round(elapsed, 4), "point_evals_per_s": round(pts / max(table_s, 1e-9))}
    return report


CRITERIA = {
    c.number: c
    for c in [
        Criterion(1, "gauss-sum-law", criterion_1),
        Criterion(2, "rank-vs-bias", criterion_2),
        Criterion(3, "rank-formula-vs-search", criterion_3),
        Criterion(4, "restriction-rank", criterion_4),
        Criterion(5, "affine-counting", criterion_5),
        Criterion(6, "admissible-density", criterion_6),
        Criterion(7, "bogolyubov", criterion_7),
        Criterion(8, "quartic-taylor", criterion_8),
        Criterion(9, "end-to-end", criterion_9),
        Criterion(10, "performance", criterion_10),
    ]
}


# --------------------------------------------------------------------------
# running


def normalize_config(config: dict | None) -> dict:
    """Fill defaults and validate; raises UsageError on a bad config."""
    if config is None:
        return dict(DEFAULT_CONFIG)
    if not isinstance(config, dict):
        raise UsageError("config must be a mapping")
    unknown = set(config) - CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    out = {"criteria": list(config.get("criteria", [])), "seed": config.get("seed", 0)}
    out["mutations"] = list(config.get("mutations", []))
    out["jobs"] = config.get("jobs", 1)
    names = {c.name: n for n, c in CRITERIA.items()}
    crit = []
    for c in out["criteria"]:
        c = names.get(c, c)
        if isinstance(c, str) and c.isdigit():
            c = int(c)
        if c not in CRITERIA:
            raise UsageError(f"unknown criterion {c!r}")
        crit.append(c)
    out["criteria"] = crit
    for m in out["mutations"]:
        if m not in MUTATIONS:
            raise UsageError(f"unknown mutation {m!r}")
    if not isinstance(out["seed"], int) or out["seed"] < 0:
        raise UsageError("seed must be a nonnegative integer")
    if not isinstance(out["jobs"], int) or out["jobs"] < 1:
        raise UsageError("jobs must be a positive integer")
    return out


def _numbered(number: int, report: CheckReport) -> CheckReport:
    report.params = {"criterion": number, **report.params}
    return report


def verify_suite(config: dict | None = None) -> tuple[list[CheckReport], int]:
    """Run the selected criteria; reports come back in declared order.

    Exit code 0 iff every report passed, 1 otherwise.
    """
    cfg = normalize_config(config)
    seed, mutations = cfg["seed"], frozenset(cfg["mutations"])
    selected = [CRITERIA[c] for c in cfg["criteria"]]
    if cfg["jobs"] > 1 and len(selected) > 1:
        with ThreadPoolExecutor(cfg["jobs"]) as pool:
            reports = list(pool.map(lambda c: _numbered(c.number, c.run(seed, mutations)), selected))
    else:
        reports = [_numbered(c.number, c.run(seed, mutations)) for c in selected]
    return reports, exit_code(reports)


def exit_code(reports: list[CheckReport]) -> int:
    return 1 if any(r.status == FAIL for r in reports) else 0
