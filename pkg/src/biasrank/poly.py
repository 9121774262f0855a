"""Multivariate polynomials over F_p with the discrete-derivative calculus.

A :class:`Polynomial` is a canonical sparse map ``exponents -> coefficient``.
Exponents are reduced eagerly with ``x**p == x`` so that equal functions
``F_p^n -> F_p`` have equal representations.  The zero polynomial has
degree -1.

:class:`ValueTable` is the dense dual form: the values of a polynomial at all
``p**n`` points in base-p row-major order (see :mod:`biasrank.gfcore`).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement, product
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .gfcore import (
    AffineSubspace,
    BudgetError,
    Subspace,
    UsageError,
    check_budget,
    check_prime,
    mat_inverse,
)

DEFAULT_MAX_DEGREE = 4
INTERNAL_MAX_DEGREE = 8


class DegreeBudgetError(UsageError):
    """A product would exceed the allowed total degree."""


def reduce_exponent(e: int, p: int) -> int:
    return e if e < p else (e - 1) % (p - 1) + 1


def _order_key(item):
    exps = item[0]
    return (sum(exps), exps)


def _add_into(acc: dict, exps, coef, p):
    v = (acc.get(exps, 0) + coef) % p
    if v:
        acc[exps] = v
    else:
        acc.pop(exps, None)


def _mul_terms(a: Mapping, b: Mapping, p: int) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(reduce_exponent(x + y, p) for x, y in zip(ea, eb))
            _add_into(out, e, ca * cb, p)
    return out


@lru_cache(maxsize=None)
def monomials(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of total degree exactly d, in a fixed order."""
    out = []
    for combo in combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(n: int, d: int) -> dict:
    return {e: i for i, e in enumerate(monomials(n, d))}


class Polynomial:
    """Polynomial over F_p in n variables.

    ``terms`` is a tuple of ``(exps, coef)`` pairs, nonzero coefficients only,
    sorted by descending graded-lex order.
    """

    __slots__ = ("p", "n", "terms", "_dict")

    def __init__(self, p: int, n: int, terms: Mapping | Iterable = ()):
        self.p = check_prime(p)
        self.n = int(n)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for exps, coef in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.n or any(e < 0 for e in exps):
                raise UsageError(f"bad exponent vector {exps} for n={self.n}")
            exps = tuple(reduce_exponent(e, self.p) for e in exps)
            _add_into(acc, exps, int(coef), self.p)
        self._dict = acc
        self.terms = tuple(sorted(acc.items(), key=_order_key, reverse=True))

    # construction ---------------------------------------------------------

    @classmethod
    def zero(cls, p, n):
        return cls(p, n)

    @classmethod
    def constant(cls, p, n, c):
        return cls(p, n, {(0,) * n: c})

    @classmethod
    def variable(cls, p, n, i):
        e = [0] * n
        e[i] = 1
        return cls(p, n, {tuple(e): 1})

    @classmethod
    def linear(cls, p, coeffs: Sequence[int], constant: int = 0):
        n = len(coeffs)
        terms = {tuple(int(j == i) for j in range(n)): c for i, c in enumerate(coeffs)}
        terms[(0,) * n] = constant
        return cls(p, n, terms)

    @classmethod
    def parse(cls, text: str, p: int, n: int) -> "Polynomial":
        """Parse ``"3*x1^2*x2 + 4*x3 - 2"`` (variables x1..xn)."""
        s = text.replace(" ", "").replace("**", "^")
        if not s:
            raise UsageError("empty polynomial text")
        if s[0] not in "+-":
            s = "+" + s
        acc: dict = {}
        for sign, body in re.findall(r"([+-])([^+-]+)", s):
            coef = 1
            e = [0] * n
            for factor in body.split("*"):
                m = re.fullmatch(r"x(\d+)(?:\^(\d+))?", factor)
                if m:
                    i = int(m.group(1)) - 1
                    if not 0 <= i < n:
                        raise UsageError(f"variable {factor} out of range for n={n}")
                    e[i] += int(m.group(2) or 1)
                elif re.fullmatch(r"\d+", factor):
                    coef *= int(factor)
                else:
                    raise UsageError(f"cannot parse factor {factor!r}")
            coef = -coef if sign == "-" else coef
            key = tuple(e)
            acc[key] = acc.get(key, 0) + coef
        return cls(p, n, acc)

    # basic protocol -------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return (self.p, self.n, self.terms) == (other.p, other.n, other.terms)
        if isinstance(other, int):
            return self == Polynomial.constant(self.p, self.n, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.n, self.terms))

    def __repr__(self):
        return f"Polynomial(p={self.p}, n={self.n}, {self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.terms:
            factors = [] if (c == 1 and any(exps)) else [str(c)]
            for i, e in enumerate(exps):
                if e == 1:
                    factors.append(f"x{i + 1}")
                elif e > 1:
                    factors.append(f"x{i + 1}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __bool__(self):
        return bool(self.terms)

    def as_dict(self) -> dict:
        return dict(self._dict)

    def coefficient(self, exps) -> int:
        return self._dict.get(tuple(exps), 0)

    def _check_same(self, other):
        if (self.p, self.n) != (other.p, other.n):
            raise UsageError("polynomials live over different (p, n)")

    def __add__(self, other):
        if isinstance(other, int):
            other = Polynomial.constant(self.p, self.n, other)
        self._check_same(other)
        acc = dict(self._dict)
        for e, c in other._dict.items():
            _add_into(acc, e, c, self.p)
        return Polynomial(self.p, self.n, acc)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.p, self.n, {e: -c for e, c in self._dict.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int) -> "Polynomial":
        return Polynomial(self.p, self.n, {e: c * v for e, v in self._dict.items()})

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self.scale(int(other))
        return multiply(self, other, max_degree=INTERNAL_MAX_DEGREE)

    __rmul__ = __mul__

    @property
    def degree(self) -> int:
        return degree(self)

    def __call__(self, x: Sequence[int]) -> int:
        return evaluate(self, x)

    def to_json(self):
        return {"p": self.p, "n": self.n, "terms": [{"coef": c, "exps": list(e)} for e, c in self.terms]}

    @classmethod
    def from_json(cls, data) -> "Polynomial":
        return cls(data["p"], data["n"], [(t["exps"], t["coef"]) for t in data["terms"]])


# --------------------------------------------------------------------------
# operations


def evaluate(f: Polynomial, x: Sequence[int]) -> int:
    if len(x) != f.n:
        raise UsageError(f"point of length {len(x)} for polynomial in {f.n} variables")
    p = f.p
    total = 0
    for exps, c in f.terms:
        t = c
        for xi, e in zip(x, exps):
            if e:
                t = t * pow(int(xi), e, p) % p
        total += t
    return total % p


def evaluate_points(f: Polynomial, pts: np.ndarray) -> np.ndarray:
    """Values of f at each row of ``pts`` (an int array of shape (k, n))."""
    pts = np.asarray(pts, dtype=np.int64)
    if pts.ndim != 2 or pts.shape[1] != f.n:
        raise UsageError("points array has wrong shape")
    p = f.p
    k = pts.shape[0]
    if not f.terms:
        return np.zeros(k, dtype=np.int64)
    maxe = max(max(e) for e, _ in f.terms)
    powers = [np.ones((k, maxe + 1), dtype=np.int64) for _ in range(f.n)]
    for i in range(f.n):
        for e in range(1, maxe + 1):
            powers[i][:, e] = powers[i][:, e - 1] * pts[:, i] % p
    out = np.zeros(k, dtype=np.int64)
    for exps, c in f.terms:
        t = np.full(k, c, dtype=np.int64)
        for i, e in enumerate(exps):
            if e:
                t = t * powers[i][:, e] % p
        out += t
    return out % p


def multiply(f: Polynomial, g: Polynomial, max_degree: int = DEFAULT_MAX_DEGREE) -> Polynomial:
    f._check_same(g)
    if f and g:
        d = degree(f) + degree(g)
        if d > max_degree:
            raise DegreeBudgetError(f"product degree {d} exceeds max {max_degree}")
        if d >= f.p:
            raise DegreeBudgetError(f"product degree {d} must stay below p={f.p}")
    return Polynomial(f.p, f.n, _mul_terms(f._dict, g._dict, f.p))


def degree(f: Polynomial) -> int:
    if not f.terms:
        return -1
    return max(sum(e) for e, _ in f.terms)


def homogeneous_part(f: Polynomial, d: int) -> Polynomial:
    return Polynomial(f.p, f.n, {e: c for e, c in f.terms if sum(e) == d})


def shift(f: Polynomial, h: Sequence[int]) -> Polynomial:
    """The polynomial x -> f(x + h)."""
    if len(h) != f.n:
        raise UsageError("direction has wrong length")
    p = f.p
    acc: dict = {}
    for exps, c in f.terms:
        per_var = []
        for hi, e in zip(h, exps):
            hi = int(hi) % p
            per_var.append([(k, comb(e, k) * pow(hi, e - k, p) % p) for k in range(e + 1) if k == e or hi])
        for choice in product(*per_var):
            coef = c
            for _, w in choice:
                coef = coef * w % p
            if coef:
                _add_into(acc, tuple(k for k, _ in choice), coef, p)
    return Polynomial(p, f.n, acc)


def discrete_derivative(f: Polynomial, h: Sequence[int]) -> Polynomial:
    """x -> f(x + h) - f(x)."""
    return shift(f, h) - f


def iterated_derivative(f: Polynomial, hs: Sequence[Sequence[int]]) -> Polynomial:
    if len(hs) > 5:
        raise UsageError("at most 5 directions")
    for h in hs:
        f = discrete_derivative(f, h)
    return f


def derivative_degree(f: Polynomial) -> int:
    """Degree through vanishing of iterated derivatives.

    The smallest d such that every (d+1)-fold derivative vanishes.  Derivatives
    along arbitrary directions are polynomials in the coordinate derivatives,
    so it is enough to scan multisets of unit vectors.
    """
    if not f:
        return -1
    units = [tuple(int(i == j) for j in range(f.n)) for i in range(f.n)]
    d = 0
    while True:
        if all(not iterated_derivative(f, [units[i] for i in combo]) for combo in combinations_with_replacement(range(f.n), d + 1)):
            return d
        d += 1


def compose_affine(f: Polynomial, basis: Sequence[Sequence[int]], offset: Sequence[int]) -> Polynomial:
    """Substitute ``x = offset + sum_j c_j basis[j]``; result is in the c's."""
    p, m = f.p, len(basis)
    subs = []
    for i in range(f.n):
        t = {tuple(int(k == j) for k in range(m)): basis[j][i] for j in range(m)}
        const = (0,) * m
        t[const] = (t.get(const, 0) + offset[i]) % p
        subs.append({e: c % p for e, c in t.items() if c % p})
    one = {(0,) * m: 1}
    power_cache: dict = {}

    def power(i, e):
        key = (i, e)
        if key not in power_cache:
            power_cache[key] = one if e == 0 else _mul_terms(power(i, e - 1), subs[i], p)
        return power_cache[key]

    acc: dict = {}
    for exps, c in f.terms:
        term = {(0,) * m: c}
        for i, e in enumerate(exps):
            if e:
                term = _mul_terms(term, power(i, e), p)
        for e, v in term.items():
            _add_into(acc, e, v, p)
    return Polynomial(p, m, acc)


def restrict(f: Polynomial, s: Subspace | AffineSubspace) -> Polynomial:
    """f on s, as a polynomial in dim(s) coordinates along the RREF basis."""
    direction = s.direction if isinstance(s, AffineSubspace) else s
    if direction.n != f.n:
        raise UsageError("dimension mismatch")
    offset = s.offset if isinstance(s, AffineSubspace) else (0,) * f.n
    return compose_affine(f, direction.basis, offset)


def pull_back(g: Polynomial, s: Subspace) -> Polynomial:
    """A polynomial on F_p^n whose restriction to s is g.

    Uses that for x in s the basis coordinates are read off at the pivots.
    """
    if g.n != s.dim:
        raise UsageError("polynomial is not in the subspace coordinates")
    piv = s.pivots
    acc = {}
    for exps, c in g.terms:
        e = [0] * s.n
        for j, k in enumerate(exps):
            e[piv[j]] = k
        acc[tuple(e)] = c
    return Polynomial(g.p, s.n, acc)


# --------------------------------------------------------------------------
# homogeneous coefficient vectors


def homogeneous_vector(f: Polynomial, d: int) -> tuple[int, ...]:
    idx = monomial_index(f.n, d)
    out = [0] * len(idx)
    for e, c in f.terms:
        if sum(e) == d:
            out[idx[e]] = c
    return tuple(out)


def from_homogeneous_vector(p: int, n: int, d: int, v: Sequence[int]) -> Polynomial:
    return Polynomial(p, n, {e: c for e, c in zip(monomials(n, d), v) if c})


# --------------------------------------------------------------------------
# dense value tables


@lru_cache(maxsize=None)
def _vandermonde(p: int) -> tuple[np.ndarray, np.ndarray]:
    v = [[pow(x, k, p) if (x or k) else 1 for k in range(p)] for x in range(p)]
    return np.array(v, dtype=np.int64), np.array(mat_inverse(v, p), dtype=np.int64)


def _apply_each_axis(t: np.ndarray, m: np.ndarray, p: int) -> np.ndarray:
    for axis in range(t.ndim):
        t = np.moveaxis(np.tensordot(m, t, axes=([1], [axis])), 0, axis) % p
    return t


@dataclass(frozen=True, eq=False)
class ValueTable:
    p: int
    n: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.int64).reshape(-1) % self.p
        if vals.shape[0] != self.p**self.n:
            raise UsageError(f"table length {vals.shape[0]} != p**n = {self.p ** self.n}")
        object.__setattr__(self, "values", vals)

    def __eq__(self, other):
        return isinstance(other, ValueTable) and (self.p, self.n) == (other.p, other.n) and np.array_equal(self.values, other.values)

    def to_json(self):
        return {"p": self.p, "n": self.n, "values": self.values.tolist()}

    @classmethod
    def from_json(cls, data):
        return cls(data["p"], data["n"], np.array(data["values"]))


def to_table(f: Polynomial, budget: int | None = None) -> ValueTable:
    p, n = f.p, f.n
    check_budget(p**n, budget)
    if n == 0:
        return ValueTable(p, 0, np.array([f.coefficient(())]))
    coeffs = np.zeros((p,) * n, dtype=np.int64)
    for e, c in f.terms:
        coeffs[e] = c
    vander, _ = _vandermonde(p)
    return ValueTable(p, n, _apply_each_axis(coeffs, vander, p))


def interpolate_from_table(t: ValueTable, budget: int | None = None) -> Polynomial:
    """The unique polynomial with per-variable exponents < p matching t."""
    p, n = t.p, t.n
    check_budget(p**n, budget)
    if n == 0:
        return Polynomial.constant(p, 0, int(t.values[0]))
    _, vinv = _vandermonde(p)
    coeffs = _apply_each_axis(t.values.reshape((p,) * n), vinv, p)
    nz = np.argwhere(coeffs)
    return Polynomial(p, n, [(tuple(int(v) for v in e), int(coeffs[tuple(e)])) for e in nz])


__all__ = [
    "BudgetError",
    "DEFAULT_MAX_DEGREE",
    "DegreeBudgetError",
    "Polynomial",
    "ValueTable",
    "compose_affine",
    "degree",
    "derivative_degree",
    "discrete_derivative",
    "evaluate",
    "evaluate_points",
    "from_homogeneous_vector",
    "homogeneous_part",
    "homogeneous_vector",
    "interpolate_from_table",
    "iterated_derivative",
    "monomials",
    "multiply",
    "pull_back",
    "restrict",
    "shift",
    "to_table",
]
