"""Brute-force Schmidt rank, independent of the quadratic-form theory.

The search works on the top homogeneous part f_d of f.  A presentation of
rank r is ``f_d = sum_{i<=r} g_i h_i`` with g_i, h_i homogeneous of degrees
(a, d - a), a in {1, 2}, and g_i normalized (first nonzero coefficient 1).
The lower-degree rest of f is then the g_0 term.  Within this normal form the
search is exhaustive: for r = 1, 2, ... every multiset of r - 1 products is
subtracted from f_d and the difference is looked up in the sorted table of
all products.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement, product
from math import comb

import numpy as np

from ..gfcore import DEFAULT_BUDGET, UsageError, projective_points
from ..poly import Polynomial, degree, from_homogeneous_vector, homogeneous_part, homogeneous_vector, monomial_index, monomials

GREATER = "greater-than-cap"
UNKNOWN = "unknown"


@dataclass
class RankProbe:
    target: Polynomial
    cap: int
    result: int | str
    factors: list[tuple[Polynomial, Polynomial]] = field(default_factory=list)
    remainder: Polynomial | None = None
    work: int = 0

    @property
    def resolved(self) -> bool:
        return isinstance(self.result, int)

    def to_json(self):
        return {
            "target": str(self.target),
            "cap": self.cap,
            "result": self.result,
            "factors": [[str(g), str(h)] for g, h in self.factors],
            "remainder": None if self.remainder is None else str(self.remainder),
            "work": self.work,
        }


def _encode(digits: np.ndarray, p: int) -> np.ndarray:
    weights = p ** np.arange(digits.shape[-1] - 1, -1, -1, dtype=np.int64)
    return digits @ weights


def _decode(codes: np.ndarray, p: int, m: int) -> np.ndarray:
    out = np.empty((len(codes), m), dtype=np.int64)
    c = codes.copy()
    for j in range(m - 1, -1, -1):
        out[:, j] = c % p
        c //= p
    return out


def _forms(p: int, n: int, a: int, projective: bool) -> np.ndarray:
    m = len(monomials(n, a))
    pts = projective_points(p, m) if projective else [v for v in product(range(p), repeat=m) if any(v)]
    return np.array(pts, dtype=np.int64).reshape(-1, m)


def _product_table(p: int, n: int, d: int):
    """Distinct normalized products g*h as coefficient vectors, with one representative each."""
    idx = monomial_index(n, d)
    codes, reps = [], []
    for a in sorted({1, 2} & set(range(1, d))):
        b = d - a
        G = _forms(p, n, a, projective=True)
        H = _forms(p, n, b, projective=False)
        ma, mb = monomials(n, a), monomials(n, b)
        prod = np.zeros((len(G), len(H), len(idx)), dtype=np.int64)
        for i, ea in enumerate(ma):
            for j, eb in enumerate(mb):
                k = idx[tuple(x + y for x, y in zip(ea, eb))]
                prod[:, :, k] += np.outer(G[:, i], H[:, j])
        prod %= p
        flat = _encode(prod.reshape(-1, len(idx)), p)
        codes.append(flat)
        gi, hi = np.divmod(np.arange(len(flat)), len(H))
        reps += [(a, G[x], H[y]) for x, y in zip(gi, hi)]
    codes = np.concatenate(codes)
    uniq, first = np.unique(codes, return_index=True)
    return uniq, [reps[i] for i in first]


@lru_cache(maxsize=None)
def _table(p: int, n: int, d: int):
    prods, reps = _product_table(p, n, d)
    return prods, _decode(prods, p, len(monomials(n, d))), reps


def _find(target: np.ndarray, r: int, prods, digits, p: int, budget: int):
    """Indices of r products summing to target, [] if none, None if over budget.

    The first r - 1 products run over nondecreasing index tuples; the last
    one is found by membership in the sorted product table.
    """
    k = len(prods)
    outer = comb(k + r - 2, r - 1) if r > 1 else 1
    if outer > budget:
        return None
    if r == 1:
        code = int(_encode(target, p))
        pos = int(np.searchsorted(prods, code))
        return [pos] if pos < k and prods[pos] == code else []
    for head in combinations_with_replacement(range(k), r - 2):
        rest = (target - digits[list(head)].sum(axis=0)) % p if head else target
        diffs = _encode((rest[None, :] - digits) % p, p)
        pos = np.minimum(np.searchsorted(prods, diffs), k - 1)
        hit = np.nonzero(prods[pos] == diffs)[0]
        if len(hit):
            j = int(hit[0])
            return list(head) + [j, int(pos[j])]
    return []


def bounded_schmidt_rank(f: Polynomial, cap: int, degree_of: int | None = None, budget: int | None = None) -> RankProbe:
    """Exact rank of f if it is at most ``cap``.

    ``degree_of`` fixes the degree d against which the rank is measured
    (default deg f); a polynomial of lower degree has rank 0.  Returns
    "greater-than-cap" when no presentation with <= cap products exists and
    "unknown" when the budget runs out first.
    """
    p, n = f.p, f.n
    d = degree(f) if degree_of is None else degree_of
    if degree(f) > d:
        raise UsageError("polynomial degree exceeds the rank degree")
    if cap < 0:
        raise UsageError("cap must be nonnegative")
    budget = DEFAULT_BUDGET if budget is None else budget
    top = homogeneous_part(f, d) if d >= 0 else Polynomial.zero(p, n)
    if not top:
        return RankProbe(f, cap, 0, [], f)
    if d not in (2, 3, 4):
        raise UsageError("rank search supports degrees 2, 3 and 4")
    if d >= p:
        raise UsageError("rank search needs degree below p")
    raw = sum((p ** len(monomials(n, a)) - 1) // (p - 1) * (p ** len(monomials(n, d - a)) - 1) for a in {1, 2} & set(range(1, d)))
    if raw > budget:
        return RankProbe(f, cap, UNKNOWN)
    prods, digits, reps = _table(p, n, d)
    target = np.array(homogeneous_vector(top, d), dtype=np.int64)
    work = raw
    found = None
    for r in range(1, cap + 1):
        idx = _find(target, r, prods, digits, p, budget - work)
        if idx is None:
            return RankProbe(f, cap, UNKNOWN, work=work)
        work += comb(len(prods) + r - 2, r - 1)
        if idx:
            found = idx
            break
    if found is None:
        return RankProbe(f, cap, GREATER, work=work)
    r = len(found)
    factors = []
    for k in found:
        a, g, h = reps[k]
        factors.append((from_homogeneous_vector(p, n, a, g), from_homogeneous_vector(p, n, d - a, h)))
    rest = f
    for g, h in factors:
        rest = rest - g * h
    if degree(rest) >= d:
        raise AssertionError("reconstructed presentation does not match the target")
    return RankProbe(f, cap, r, factors, rest, work)
