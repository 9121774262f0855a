"""Families of quadratics: regularity, regularization, zero sets and counting."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .gfcore import (
    AffineSubspace,
    Subspace,
    UsageError,
    check_budget,
    forms_kernel,
    indices_of,
    intersect_subspaces,
    points_array,
    projective_points,
)
from .poly import Polynomial, degree, evaluate_points, homogeneous_part, iterated_derivative, restrict
from .quadform import QuadraticPoly, as_quadratic, schmidt_rank, schmidt_rank_value


@dataclass(frozen=True)
class QuadFamily:
    """Quadratics Q_1..Q_N on F_p^n, considered on the subspace ``ambient``."""

    quads: tuple[QuadraticPoly, ...]
    ambient: Subspace

    def __post_init__(self):
        quads = tuple(as_quadratic(q) for q in self.quads)
        for q in quads:
            if q.n != self.ambient.n or q.p != self.ambient.p:
                raise UsageError("family member does not live on the ambient space")
        object.__setattr__(self, "quads", quads)

    @classmethod
    def of(cls, polys: Sequence, p: int, n: int, ambient: Subspace | None = None) -> "QuadFamily":
        qs = tuple(as_quadratic(Polynomial.parse(q, p, n) if isinstance(q, str) else q) for q in polys)
        return cls(qs, ambient if ambient is not None else Subspace.full(p, n))

    @property
    def p(self) -> int:
        return self.ambient.p

    @property
    def n(self) -> int:
        return self.ambient.n

    @property
    def N(self) -> int:
        return len(self.quads)

    def polys(self) -> list[Polynomial]:
        return [q.to_poly() for q in self.quads]

    def combination(self, a: Sequence[int]) -> Polynomial:
        total = Polynomial.zero(self.p, self.n)
        for c, q in zip(a, self.polys()):
            total = total + q.scale(c)
        return total

    def to_json(self):
        return {"p": self.p, "n": self.n, "quads": [str(q) for q in self.polys()], "ambient": self.ambient.to_json()}

    @classmethod
    def from_json(cls, data) -> "QuadFamily":
        p, n = data["p"], data["n"]
        amb = Subspace.from_json(p, data["ambient"]) if "ambient" in data else None
        return cls.of(data["quads"], p, n, amb)


@dataclass
class Regularity:
    value: int
    witness: tuple[int, ...] | None
    sentinel: bool = False

    def to_json(self):
        return {"R": self.value, "witness": list(self.witness) if self.witness else None, "unbounded": self.sentinel}


def regularity(fam: QuadFamily, budget: int | None = None) -> Regularity:
    """Least Schmidt rank over nonzero combinations, restricted to the ambient.

    Combinations are scanned projectively. An empty family is reported with
    the sentinel value p^n + 1.
    """
    p = fam.p
    if fam.N == 0:
        return Regularity(p**fam.n + 1, None, True)
    check_budget(p**fam.N - 1, budget)
    restricted = [as_quadratic(restrict(q, fam.ambient)) for q in fam.polys()] if fam.ambient.dim else None
    best = None
    for a in projective_points(p, fam.N):
        if restricted is None:
            r = 0
        else:
            combo = restricted[0].scale(a[0])
            for c, q in zip(a[1:], restricted[1:]):
                combo = combo + q.scale(c)
            r = schmidt_rank_value(combo)
        if best is None or r < best[0]:
            best = (r, a)
            if r == 0:
                break
    return Regularity(best[0], best[1])


@dataclass
class RegularizeStep:
    removed: int
    witness: tuple[int, ...]
    rank: int
    forms: list[tuple[int, ...]]

    def to_json(self):
        return {"removed": self.removed, "witness": list(self.witness), "rank": self.rank, "forms": [list(f) for f in self.forms]}


@dataclass
class RegularizeResult:
    family: QuadFamily
    subspace: Subspace
    steps: list[RegularizeStep] = field(default_factory=list)
    regularity: Regularity | None = None

    def __iter__(self):
        # allows ``fam, V = regularize(...)``
        return iter((self.family, self.subspace))


def regularize(fam: QuadFamily, R: int, V: Subspace | None = None, budget: int | None = None) -> RegularizeResult:
    """Drop members and pass to subspaces until the family is R-regular.

    Each step takes a lowest-rank combination, removes the member with the
    largest index in it and restricts to the common kernel of the first
    factors of its rank certificate. Zero sets are preserved when the
    members are homogeneous.
    """
    if R < 1:
        raise UsageError("R must be at least 1")
    V = fam.ambient if V is None else intersect_subspaces(V, fam.ambient)
    quads = list(fam.quads)
    steps = []
    while True:
        cur = QuadFamily(tuple(quads), V)
        reg = regularity(cur, budget)
        if reg.value >= R:
            return RegularizeResult(cur, V, steps, reg)
        a = reg.witness
        k = max(i for i, c in enumerate(a) if c)
        forms = []
        if V.dim:
            cert = schmidt_rank(restrict(cur.combination(a), V))
            piv = V.pivots
            for alpha, _ in cert.factors:
                # the form lives in V-coordinates, which are read off at the pivots
                full = [0] * V.n
                for j, c in enumerate(alpha.coeffs):
                    full[piv[j]] = c
                forms.append(tuple(full))
            if forms:
                V = intersect_subspaces(V, forms_kernel(V.p, V.n, forms))
        steps.append(RegularizeStep(k, tuple(a), reg.value, forms))
        del quads[k]


# --------------------------------------------------------------------------
# zero sets


@dataclass(frozen=True, eq=False)
class ZeroSet:
    """Common zeros of a family inside ``base``; points sorted by index."""

    family: QuadFamily
    base: Subspace | AffineSubspace
    point_array: np.ndarray
    index_array: np.ndarray

    def __len__(self) -> int:
        return int(self.point_array.shape[0])

    def contains(self, x: Sequence[int]) -> bool:
        if not self.base.contains(x):
            return False
        return all(q(x) == 0 for q in self.family.quads)

    __contains__ = contains

    def member_mask(self, pts: np.ndarray) -> np.ndarray:
        idx = indices_of(np.asarray(pts, dtype=np.int64) % self.family.p, self.family.p)
        pos = np.searchsorted(self.index_array, idx)
        pos = np.minimum(pos, max(len(self.index_array) - 1, 0))
        if len(self.index_array) == 0:
            return np.zeros(len(idx), dtype=bool)
        return self.index_array[pos] == idx

    def points(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self.point_array]

    def to_json(self):
        return {"p": self.family.p, "n": self.family.n, "size": len(self), "points": self.index_array.tolist()}


def _zero_mask(fam: QuadFamily, pts: np.ndarray) -> np.ndarray:
    mask = np.ones(pts.shape[0], dtype=bool)
    for q in fam.polys():
        mask &= evaluate_points(q, pts) == 0
    return mask


def _make_zero_set(fam, base, pts) -> ZeroSet:
    idx = indices_of(pts, fam.p) if len(pts) else np.zeros(0, dtype=np.int64)
    order = np.argsort(idx, kind="stable")
    return ZeroSet(fam, base, pts[order], idx[order])


def zero_set(fam: QuadFamily, V: Subspace | AffineSubspace | None = None, budget: int | None = None) -> ZeroSet:
    base = fam.ambient if V is None else V
    pts = points_array(base, budget)
    return _make_zero_set(fam, base, pts[_zero_mask(fam, pts)])


def shifted(z: ZeroSet, t: Sequence[int]) -> ZeroSet:
    """X_t: the x in X with x + t in X as well."""
    p = z.family.p
    if len(t) != z.family.n:
        raise UsageError("dimension mismatch")
    moved = (z.point_array + np.asarray(t, dtype=np.int64)) % p
    keep = z.member_mask(moved) if len(z) else np.zeros(0, dtype=bool)
    return ZeroSet(z.family, z.base, z.point_array[keep], z.index_array[keep])


# --------------------------------------------------------------------------
# admissibility


def _gram_stack(fam: QuadFamily) -> np.ndarray:
    if fam.N == 0:
        return np.zeros((0, fam.n, fam.n), dtype=np.int64)
    return np.array([q.gram_matrix() for q in fam.quads], dtype=np.int64)


def admissible(h: Sequence[Sequence[int]], fam: QuadFamily) -> bool:
    """All cross pairings (h_i, h_j) vanish for every member, i != j."""
    if len(h) > 4:
        raise UsageError("tuples longer than 4 are not supported")
    grams = _gram_stack(fam)
    hs = np.asarray(h, dtype=np.int64).reshape(len(h), fam.n)
    for i in range(len(h)):
        for j in range(i + 1, len(h)):
            if np.any((np.einsum("a,kab,b->k", hs[i], grams, hs[j])) % fam.p):
                return False
    return True


def _orthogonality(pts: np.ndarray, grams: np.ndarray, p: int) -> np.ndarray:
    """O[a, b] = 1 iff (pts[a], pts[b]) vanishes for every member."""
    o = np.ones((len(pts), len(pts)), dtype=bool)
    for g in grams:
        o &= ((pts @ g) @ pts.T) % p == 0
    return o


def _subset_points(fset, n: int) -> np.ndarray:
    pts = getattr(fset, "point_array", None)
    if pts is None:
        pts = fset
    return np.asarray(pts, dtype=np.int64).reshape(-1, n)


def _pairing_kernel(W: Subspace, t, grams, p) -> Subspace:
    rows = [tuple(int(v) for v in (np.asarray(t) @ g) % p) for g in grams]
    return intersect_subspaces(W, forms_kernel(W.p, W.n, rows)) if rows else W


@dataclass
class DensityResult:
    density: Fraction
    bound: Fraction
    holds: bool
    admissible_count: int

    def to_json(self):
        return {
            "density": str(self.density),
            "bound": str(self.bound),
            "density_float": float(self.density),
            "bound_float": float(self.bound),
            "holds": self.holds,
            "admissible_count": self.admissible_count,
        }


def admissible_density(fset, W: Subspace, fam: QuadFamily, budget: int | None = None) -> DensityResult:
    """Exact P[(t, h) in Fset x W^3 and admissible] over t, h uniform in the ambient.

    Compared with p^(-6N - 3r) * mu, r = codim of W in the ambient.
    """
    V1 = fam.ambient
    if not W.is_subspace_of(V1):
        raise UsageError("W must lie in the ambient subspace")
    p = fam.p
    ts = _subset_points(fset, fam.n)
    check_budget(len(ts) * len(W), budget)
    grams = _gram_stack(fam)
    cache: dict[Subspace, int] = {}
    count = 0
    for t in ts:
        Wt = _pairing_kernel(W, t, grams, p)
        if Wt not in cache:
            pts = points_array(Wt, budget)
            o = _orthogonality(pts, grams, p).astype(np.float64)
            cache[Wt] = int(round(float(np.sum(o * (o @ o)))))
        count += cache[Wt]
    size = len(V1)
    density = Fraction(count, size**4)
    mu = Fraction(len(ts), size)
    r = V1.dim - W.dim
    bound = mu / Fraction(p) ** (6 * fam.N + 3 * r)
    return DensityResult(density, bound, density >= bound, count)


# --------------------------------------------------------------------------
# counting on affine subspaces


@dataclass
class AffineCount:
    in_both: int
    in_affine: int
    total: int
    deviation: Fraction
    R: int
    p: int
    holds: bool

    def to_json(self):
        return {
            "in_both": self.in_both,
            "in_affine": self.in_affine,
            "total": self.total,
            "deviation": str(self.deviation),
            "deviation_float": float(self.deviation),
            "R": self.R,
            "bound_float": float(self.p) ** (-self.R / 2),
            "holds": self.holds,
        }


def affine_counting_check(
    A: AffineSubspace, fam: QuadFamily, R: int | None = None, budget: int | None = None
) -> AffineCount:
    """Exact |P(x in A and X) - p^-N P(x in A)| against p^(-R/2), x uniform in the ambient."""
    V1 = fam.ambient
    p = fam.p
    if not A.direction.is_subspace_of(V1) or not V1.contains(A.offset):
        raise UsageError("affine subspace must lie in the ambient")
    if R is None:
        R = regularity(fam, budget).value
    pts = points_array(A, budget)
    hits = int(np.count_nonzero(_zero_mask(fam, pts)))
    total = len(V1)
    dev = abs(Fraction(hits, total) - Fraction(len(A), total * p**fam.N))
    return AffineCount(hits, len(A), total, dev, R, p, dev * dev * p**R <= 1)


def codim_one_affine_subspaces(V: Subspace):
    """Every affine hyperplane of V (as subsets of F_p^n)."""
    p = V.p
    piv = V.pivots
    for a in projective_points(p, V.dim):
        full = [0] * V.n
        for j, c in enumerate(a):
            full[piv[j]] = c
        H = intersect_subspaces(V, forms_kernel(p, V.n, [full]))
        # a point of V with form value 1 shifts H through all cosets
        j0 = next(j for j, c in enumerate(a) if c)
        unit = V.basis[j0]
        scale = pow(a[j0], -1, p)
        for c in range(p):
            yield AffineSubspace(tuple((c * scale * u) % p for u in unit), H)


# --------------------------------------------------------------------------
# cubicity


def quartic_form_tensor(f: Polynomial) -> np.ndarray:
    """D[i,j,k,l] = Delta_{e_i} Delta_{e_j} Delta_{e_k} Delta_{e_l} f (a constant for deg f <= 4)."""
    if degree(f) > 4:
        raise UsageError("fourth-derivative tensor needs degree <= 4")
    n = f.n
    f4 = homogeneous_part(f, 4)
    d = np.zeros((n,) * 4, dtype=np.int64)
    if not f4:
        return d
    units = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    memo = {}
    for idx in product(range(n), repeat=4):
        key = tuple(sorted(idx))
        if key not in memo:
            memo[key] = iterated_derivative(f4, [units[i] for i in key]).coefficient((0,) * n)
        d[idx] = memo[key]
    return d


def quartic_form_value(d: np.ndarray, hs: Sequence[Sequence[int]], p: int) -> int:
    h = [np.asarray(v, dtype=np.int64) for v in hs]
    return int(np.einsum("ijkl,i,j,k,l->", d, *h) % p)


@dataclass
class CubicityResult:
    defect: Fraction
    admissible: int
    violations: int
    exhaustive: bool
    no_admissible: bool
    seed: int | None = None

    def to_json(self):
        return {
            "defect": str(self.defect),
            "defect_float": float(self.defect),
            "admissible": self.admissible,
            "violations": self.violations,
            "exhaustive": self.exhaustive,
            "no_admissible": self.no_admissible,
            "seed": self.seed,
        }


def cubicity_defect(
    f: Polynomial,
    fset,
    W: Subspace,
    fam: QuadFamily,
    budget: int | None = None,
    samples: int = 20000,
    seed: int = 0,
) -> CubicityResult:
    """Fraction of admissible (t, h) in Fset x W^3 with Delta_h1 Delta_h2 Delta_h3 Delta_t f != 0.

    Exhaustive when |Fset| |W|^3 fits the budget; otherwise ``samples``
    tuples are drawn from a seeded generator and the counts are reported.
    """
    p, n = fam.p, fam.n
    D = quartic_form_tensor(f)
    ts = _subset_points(fset, n)
    grams = _gram_stack(fam)
    adm = viol = 0
    limit = budget if budget is not None else 2_000_000
    exhaustive = len(ts) * len(W) ** 3 <= limit
    if exhaustive:
        for t in ts:
            Wt = _pairing_kernel(W, t, grams, p)
            pts = points_array(Wt)
            o = _orthogonality(pts, grams, p)
            m3 = np.einsum("ijkl,i->jkl", D, t) % p
            for a in range(len(pts)):
                bs = np.nonzero(o[a])[0]
                if len(bs) == 0:
                    continue
                m2 = np.einsum("jkl,j->kl", m3, pts[a]) % p
                sub = o[np.ix_(bs, bs)]
                vals = (pts[bs] @ m2 @ pts[bs].T) % p
                adm += int(sub.sum())
                viol += int(np.count_nonzero(sub & (vals != 0)))
        seed = None
    else:
        rng = np.random.default_rng(seed)
        wb = np.asarray(W.basis, dtype=np.int64)
        for _ in range(samples):
            t = ts[rng.integers(len(ts))]
            hs = rng.integers(0, p, size=(3, W.dim)) @ wb % p
            quad = [t, *hs]
            if admissible(quad, fam):
                adm += 1
                if quartic_form_value(D, quad, p):
                    viol += 1
    if adm == 0:
        return CubicityResult(Fraction(0), 0, 0, exhaustive, True, seed)
    return CubicityResult(Fraction(viol, adm), adm, viol, exhaustive, False, seed)


def zero_set_from_polys(polys: Sequence[Polynomial], V: Subspace, budget: int | None = None) -> ZeroSet:
    fam = QuadFamily(tuple(as_quadratic(q) for q in polys), Subspace.full(V.p, V.n))
    return zero_set(fam, V, budget)
