"""From a quartic to a family of quadratics whose zeros kill its quartic part.

Work happens in the coordinates of a subspace V.  For a direction y the cubic
part of Delta_y f is ``g_y = y . grad f_4``; it is presented as
``g_y = sum_{i<=s} alpha_i P_i`` with linear alpha_i and quadratic P_i, s as
small as possible.  Such a presentation with a given span of alphas exists
exactly when g_y vanishes on the common kernel K of the alphas, and since
deg g_y < p this is a finite check on the points of K.

For every minimal presentation the quadratics P_i (over the whole solution
space of the linear system) span a space T.  The pool I starts as all
quadratics and is intersected with such spaces, one at a time, as long as
every basis derivative stays in the cubic part I * (linear forms) of the
ideal.  Directions with a single minimal presentation are used first, then
directions where only one presentation still allows a shrink.  That
condition gives ``4 f_4 = sum_i x_i g_{e_i}`` in the ideal generated by I
(Euler, p >= 5), so common zeros of I are zeros of f_4.

A second candidate pool comes from a beam search over the choice of
presentation per direction, which recovers the family when no direction has
a unique presentation.  The pipeline compresses every candidate to a
smallest subfamily, keeps the smallest one that verifies, regularizes, and
re-verifies the implication on every point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..gfcore import (
    DEFAULT_BUDGET,
    Subspace,
    UsageError,
    all_points,
    forms_kernel,
    indices_of,
    points_array,
    projective_points,
    rank,
    rref,
    solve_matrix,
    subspaces_of_dim,
)
from ..poly import (
    Polynomial,
    degree,
    discrete_derivative,
    evaluate_points,
    from_homogeneous_vector,
    homogeneous_part,
    homogeneous_vector,
    monomial_index,
    monomials,
    pull_back,
    restrict,
    to_table,
)
from ..quadfamily import QuadFamily, regularize
from .checks import FAIL, PASS, CheckReport, _Timer, implication_check
from .generators import SplitMix64

DEFAULT_CAP = 3


@lru_cache(maxsize=None)
def _kernels(p: int, k: int, s: int):
    """(alpha basis, point indices of the kernel) for every s-dimensional space of forms."""
    out = []
    for lam in subspaces_of_dim(p, k, s):
        K = forms_kernel(p, k, lam.basis)
        out.append((lam.basis, indices_of(points_array(K), p)))
    return out


@lru_cache(maxsize=None)
def _mult_matrix(k: int, a: int, b: int) -> tuple:
    """For each monomial pair, the index of their product among degree-(a+b) monomials."""
    idx = monomial_index(k, a + b)
    return tuple(
        tuple(idx[tuple(x + y for x, y in zip(ea, eb))] for eb in monomials(k, b)) for ea in monomials(k, a)
    )


def _ideal_system(alphas, p: int, k: int) -> list[list[int]]:
    """Columns: coefficient vector of alpha_i * m for each quadratic monomial m."""
    m2, m3 = len(monomials(k, 2)), len(monomials(k, 3))
    mult = _mult_matrix(k, 1, 2)
    cols = []
    for a in alphas:
        for j in range(m2):
            col = [0] * m3
            for i, c in enumerate(a):
                if c:
                    col[mult[i][j]] = (col[mult[i][j]] + c) % p
            cols.append(col)
    return [list(r) for r in zip(*cols)] if cols else [[] for _ in range(m3)]


def _times_linear(space: list[tuple[int, ...]], p: int, k: int) -> list[list[int]]:
    """Spanning vectors of space * (linear forms) inside the cubic coefficient space."""
    m3 = len(monomials(k, 3))
    mult = _mult_matrix(k, 2, 1)
    rows = []
    for q in space:
        for v in range(k):
            row = [0] * m3
            for j, c in enumerate(q):
                if c:
                    row[mult[j][v]] = (row[mult[j][v]] + c) % p
            rows.append(row)
    return rows


def _in_span(rows: list, vec, p: int) -> bool:
    if not any(vec):
        return True
    if not rows:
        return False
    return rank(list(rows) + [list(vec)], p) == rank(rows, p)


def _intersect(a: list, b: list, p: int, dim: int) -> list[tuple[int, ...]]:
    """Intersection of two spans in F_p^dim, as an RREF basis."""
    if not a or not b:
        return []
    ann_a = Subspace.span(p, dim, a).annihilator()
    ann_b = Subspace.span(p, dim, b).annihilator()
    return list(forms_kernel(p, dim, ann_a + ann_b).basis)


@dataclass
class Presentation:
    """Minimal presentations of one cubic: s, and per span of alphas the space of P's."""

    direction: tuple[int, ...]
    s: int | None
    spaces: list[list[tuple[int, ...]]] = field(default_factory=list)

    def to_json(self):
        return {
            "direction": list(self.direction),
            "s": self.s,
            "presentations": len(self.spaces),
            "span_dims": [len(sp) for sp in self.spaces],
        }


def present_cubic(g3: Polynomial, cap: int, budget: int | None = None) -> Presentation:
    """All minimal presentations g3 = sum_{i<=s} alpha_i P_i with s <= cap.

    ``g3`` is a homogeneous cubic in the working coordinates.  For each valid
    span of alphas the P_i of every solution are collected into one space
    (RREF basis).  ``s`` is None when no presentation exists under the cap.
    """
    p, k = g3.p, g3.n
    if not g3:
        return Presentation((), 0, [])
    table = to_table(g3, budget).values
    target = homogeneous_vector(g3, 3)
    m2 = len(monomials(k, 2))
    for s in range(1, min(cap, k) + 1):
        spaces = []
        for alphas, idx in _kernels(p, k, s):
            if np.any(table[idx]):
                continue
            sol = solve_matrix(_ideal_system(alphas, p, k), target, p, s * m2)
            if sol is None:
                raise AssertionError("cubic vanishes on the kernel but is not in the ideal")
            part, kern = sol
            quads = [tuple(v[i * m2 : (i + 1) * m2]) for v in (part, *kern) for i in range(s)]
            spaces.append(list(rref(quads, p)[0]))
        if spaces:
            return Presentation((), s, spaces)
    return Presentation((), None, [])


@dataclass
class ExtractResult:
    pool: list[Polynomial]
    subspace: Subspace
    presentations: list[Presentation]
    accepted: list[tuple[int, ...]]
    euler_condition: bool
    flag: str | None = None
    alternatives: list[list[Polynomial]] = field(default_factory=list)

    def to_json(self):
        return {
            "pool": [str(q) for q in self.pool],
            "alternatives": [[str(q) for q in pool] for pool in self.alternatives],
            "N": len(self.pool),
            "subspace": self.subspace.to_json(),
            "directions": len(self.presentations),
            "presentations": [pr.to_json() for pr in self.presentations],
            "accepted_directions": [list(a) for a in self.accepted],
            "euler_condition": self.euler_condition,
            "flag": self.flag,
        }


def derivative_extract(
    f: Polynomial,
    V: Subspace | None = None,
    cap: int = DEFAULT_CAP,
    extra: int | None = None,
    seed: int = 0,
    budget: int | None = None,
    max_extra: int | None = None,
    beam_width: int = 64,
) -> ExtractResult:
    """Quadratic pool from presentations of the cubic parts of derivatives of f.

    Directions are the basis of V, then ``extra`` seeded ones (default
    2 dim V).  Further seeded directions follow while the pool still shrank
    during the last 8 dim V directions, up to ``max_extra`` (default 24 dim V).
    The pool is returned as quadratics on the ambient space; a differing
    beam-search pool (``beam_width`` states, 0 to disable) goes into
    ``alternatives``.
    """
    p = f.p
    V = Subspace.full(p, f.n) if V is None else V
    if degree(f) > 4:
        raise UsageError("extraction needs degree <= 4")
    if p < 5:
        raise UsageError("quartic extraction needs p >= 5")
    k = V.dim
    fv = restrict(f, V)
    f4 = homogeneous_part(fv, 4)
    if not f4 or k == 0:
        return ExtractResult([], V, [], [], True, None if degree(f) <= 3 else "quartic part vanishes on V")
    m2 = len(monomials(k, 2))
    units = [tuple(int(i == j) for j in range(k)) for i in range(k)]
    rng = SplitMix64(seed)
    extra = 2 * k if extra is None else extra
    max_extra = max(extra, 24 * k) if max_extra is None else max_extra

    def cubic(y):
        return homogeneous_part(discrete_derivative(f4, y), 3)

    basis_cubics = [homogeneous_vector(cubic(u), 3) for u in units]

    euler_memo: dict = {}

    def euler_ok(space):
        key = tuple(map(tuple, space))
        if key not in euler_memo:
            ideal = _times_linear(space, p, k)
            euler_memo[key] = all(_in_span(ideal, c, p) for c in basis_cubics)
        return euler_memo[key]

    # the whole quadratic space satisfies the condition; shrink from there
    pool = [tuple(int(i == j) for j in range(m2)) for i in range(m2)]
    pres, accepted, ambiguous = [], [], []

    def absorb(pr):
        nonlocal pool
        shrank = False
        for space in pr.spaces:
            cand = _intersect(pool, space, p, m2)
            if len(cand) < len(pool) and euler_ok(cand):
                pool = cand
                accepted.append(pr.direction)
                shrank = True
        return shrank

    # directions with a single minimal presentation go first: their space
    # contains every family the cubic part comes from
    last_shrink = 0
    step = 0
    while True:
        if step < k:
            y = units[step]
        elif step < k + extra or (step < k + max_extra and step - last_shrink <= 8 * k):
            y = rng.vector(p, k)
        else:
            break
        step += 1
        pr = present_cubic(cubic(y), cap, budget)
        pr.direction = y
        pres.append(pr)
        if len(pr.spaces) == 1:
            if absorb(pr):
                last_shrink = step
        elif pr.spaces:
            ambiguous.append(pr)
    # an ambiguous direction is forced when exactly one of its spaces still
    # allows a valid shrink; repeat until nothing is forced, then go greedy
    progress = True
    while progress and ambiguous:
        progress = False
        for pr in list(ambiguous):
            options = []
            for space in pr.spaces:
                cand = _intersect(pool, space, p, m2)
                if len(cand) < len(pool) and euler_ok(cand):
                    options.append(cand)
            if len({tuple(c) for c in options}) == 1:
                pool = options[0]
                accepted.append(pr.direction)
                ambiguous.remove(pr)
                progress = True
            elif not options:
                ambiguous.remove(pr)
    for pr in ambiguous:
        absorb(pr)
    flag = "no presentation found under cap" if any(pr.s is None for pr in pres) else None

    def lift(space):
        return [pull_back(from_homogeneous_vector(p, k, 2, q), V) for q in space]

    start = tuple(tuple(int(i == j) for j in range(m2)) for i in range(m2))
    beam = _beam_pool(pres, start, euler_ok, p, m2, beam_width)
    alternatives = [lift(beam)] if beam is not None and list(beam) != pool else []
    return ExtractResult(lift(pool), V, pres, accepted, euler_ok(pool), flag, alternatives)


def _beam_pool(pres, start, euler_ok, p: int, dim: int, width: int):
    """Best pool over per-direction choices of presentation space.

    A state is a pool; each direction maps it to its intersections with the
    direction's spaces that keep the Euler condition (a state already inside
    a space stays as it is).  States with no such option keep their pool and
    count a miss.  The ``width`` states with fewest misses, then smallest
    dimension, survive each step.  Returns None when ``width`` is 0.
    """
    if width <= 0:
        return None
    states = {start: 0}
    for pr in pres:
        if not pr.spaces:
            continue
        nxt: dict = {}
        for st, miss in states.items():
            opts = set()
            for space in pr.spaces:
                cand = tuple(_intersect(list(st), space, p, dim))
                if len(cand) == len(st) or euler_ok(list(cand)):
                    opts.add(cand)
            if not opts:
                opts, miss = {st}, miss + 1
            for c in opts:
                if nxt.get(c, miss + 1) > miss:
                    nxt[c] = miss
        states = dict(sorted(nxt.items(), key=lambda kv: (kv[1], len(kv[0]), kv[0]))[:width])
    best = min(states.items(), key=lambda kv: (kv[1], len(kv[0]), kv[0]))[0]
    return list(best)


def prune_family(f: Polynomial, quads: list[Polynomial], V: Subspace, budget: int | None = None) -> list[Polynomial]:
    """Drop members, last first, while the implication keeps holding on V."""
    full = Subspace.full(f.p, f.n)
    keep = list(quads)
    if not implication_check(f, QuadFamily(tuple(keep), full), V, budget).passed:
        return keep
    for i in range(len(keep) - 1, -1, -1):
        trial = keep[:i] + keep[i + 1 :]
        if implication_check(f, QuadFamily(tuple(trial), full), V, budget).passed:
            keep = trial
    return keep


def compress_family(
    f: Polynomial, quads: list[Polynomial], V: Subspace, max_dim: int = 2, budget: int | None = None
) -> list[Polynomial]:
    """Smallest subfamily of span(quads), up to ``max_dim`` members, whose zeros kill f_4 on V.

    A family works exactly when at every point of V with f_4 != 0 some
    member is nonzero, so candidates are tested on those points only.  Falls
    back to greedy pruning of ``quads`` when no small family exists.
    """
    p, n = f.p, f.n
    pts = points_array(V, budget)
    bad = pts[evaluate_points(homogeneous_part(f, 4), pts) != 0]
    if len(bad) == 0:
        return []
    homog = [homogeneous_part(q, 2) for q in quads]
    if not homog or any(q != h for q, h in zip(quads, homog)):
        return prune_family(f, quads, V, budget)
    basis = np.array([homogeneous_vector(q, 2) for q in homog], dtype=np.int64)
    combos = np.array(projective_points(p, len(homog)), dtype=np.int64)
    if len(combos) * len(bad) > (budget or DEFAULT_BUDGET):
        return prune_family(f, quads, V, budget)
    cands = combos @ basis % p
    mons = monomials(n, 2)
    mvals = np.ones((len(mons), len(bad)), dtype=np.int64)
    for j, e in enumerate(mons):
        for i, k in enumerate(e):
            if k:
                mvals[j] = mvals[j] * bad[:, i] ** k % p
    nonzero = (cands @ mvals % p) != 0

    def as_poly(v):
        return from_homogeneous_vector(p, n, 2, [int(c) for c in v])

    full = np.nonzero(nonzero.all(axis=1))[0]
    if len(full):
        return [as_poly(cands[full[0]])]
    if max_dim >= 2 and len(cands) ** 2 * len(bad) <= 50 * (budget or DEFAULT_BUDGET):
        for i in range(len(cands)):
            hit = np.nonzero((nonzero[i] | nonzero[i + 1 :]).all(axis=1))[0]
            if len(hit):
                return [as_poly(cands[i]), as_poly(cands[i + 1 + hit[0]])]
    return prune_family(f, quads, V, budget)


def _best_family(f, pools, V, compress, budget):
    """Smallest compressed family over the candidate pools that kills f_4 on V."""
    full = Subspace.full(f.p, f.n)
    best = None
    for pool in pools:
        quads = compress_family(f, pool, V, budget=budget) if compress else pool
        ok = implication_check(f, QuadFamily(tuple(quads), full), V, budget).passed
        if ok and (best is None or len(quads) < len(best)):
            best = quads
    return best if best is not None else pools[0]


def pipeline(
    f: Polynomial,
    R: int = 1,
    cap: int = DEFAULT_CAP,
    V: Subspace | None = None,
    seed: int = 0,
    extra: int | None = None,
    compress: bool = True,
    budget: int | None = None,
) -> CheckReport:
    """Extract, compress, regularize, then verify the implication on every point of V_out."""
    p, n = f.p, f.n
    V = Subspace.full(p, n) if V is None else V
    with _Timer() as t:
        ext = derivative_extract(f, V, cap, extra, seed, budget)
        quads = _best_family(f, [ext.pool] + ext.alternatives, V, compress, budget)
        reg = regularize(QuadFamily(tuple(quads), Subspace.full(p, n)), R, V, budget)
        fam, v_out = reg.family, reg.subspace
        final = implication_check(f, QuadFamily(fam.quads, v_out), v_out, budget)
    stats = {
        "pool_size": len(ext.pool),
        "alternative_pool_sizes": [len(a) for a in ext.alternatives],
        "compressed_size": len(quads),
        "N": fam.N,
        "codim": v_out.codim,
        "euler_condition": ext.euler_condition,
        "flag": ext.flag,
        "regularity": reg.regularity.to_json() if reg.regularity else None,
        "zero_set": final.stats["zero_set"],
    }
    params = {"p": p, "n": n, "poly": str(f), "R": R, "cap": cap, "seed": seed}
    report = CheckReport("pipeline", PASS if final.passed else FAIL, params, stats, final.witnesses, t.elapsed)
    report.family = fam
    report.subspace = v_out
    report.extraction = ext
    return report
