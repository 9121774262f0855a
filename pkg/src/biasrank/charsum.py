"""Character sums and bias, decided exactly in Z[zeta_p].

The exponential sum of f over a domain D only depends on the level counts
``c_j = #{x in D : f(x) = j}``::

    S = sum_j c_j zeta^j,   |S|^2 = sum_d R_d zeta^d,   R_d = sum_j c_j c_{j+d}

``|S|^2`` is held as a :class:`CyclotomicInteger`, so claims such as
``bias(f) = p^(-m/2)`` are checked with integer arithmetic only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np

from .gfcore import AffineSubspace, Subspace, UsageError, check_budget, points_array
from .poly import Polynomial, degree, evaluate_points, to_table


@dataclass(frozen=True)
class LevelCounts:
    p: int
    counts: tuple[int, ...]
    domain_size: int

    def __post_init__(self):
        if sum(self.counts) != self.domain_size or len(self.counts) != self.p:
            raise UsageError("level counts do not add up to the domain size")

    def to_json(self):
        return list(self.counts)


class CyclotomicInteger:
    """Element of Z[zeta_p] in the basis 1, zeta, ..., zeta^(p-2)."""

    __slots__ = ("p", "coords")

    def __init__(self, p: int, coords: Sequence[int]):
        self.p = p
        coords = [int(c) for c in coords]
        if len(coords) == p:
            # fold zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2))
            top = coords.pop()
            coords = [c - top for c in coords]
        if len(coords) != p - 1:
            raise UsageError("cyclotomic integer needs p-1 (or p) coordinates")
        self.coords = tuple(coords)

    @classmethod
    def from_exponent_weights(cls, p: int, weights: Sequence[int]) -> "CyclotomicInteger":
        """sum_k weights[k] zeta^k for k = 0..p-1."""
        return cls(p, list(weights))

    def _full(self):
        return list(self.coords) + [0]

    def __add__(self, other):
        return CyclotomicInteger(self.p, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other):
        return CyclotomicInteger(self.p, [a - b for a, b in zip(self.coords, other.coords)])

    def __mul__(self, other):
        p = self.p
        if isinstance(other, int):
            return CyclotomicInteger(p, [other * a for a in self.coords])
        out = [0] * p
        for i, a in enumerate(self._full()):
            if a:
                for j, b in enumerate(other._full()):
                    out[(i + j) % p] += a * b
        return CyclotomicInteger(p, out)

    def conjugate(self):
        p = self.p
        out = [0] * p
        for i, a in enumerate(self._full()):
            out[(-i) % p] += a
        return CyclotomicInteger(p, out)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.coords == (other,) + (0,) * (self.p - 2)
        return isinstance(other, CyclotomicInteger) and self.p == other.p and self.coords == other.coords

    def __hash__(self):
        return hash((self.p, self.coords))

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def rational_value(self) -> int:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coords[0]

    def to_complex(self) -> complex:
        with mpmath.workdps(40):
            z = mpmath.expjpi(mpmath.mpf(2) / self.p)
            return complex(mpmath.fsum(c * z**k for k, c in enumerate(self.coords)))

    def __repr__(self):
        return f"CyclotomicInteger(p={self.p}, {list(self.coords)})"


def _domain_values(f: Polynomial, domain, budget: int | None) -> np.ndarray:
    if domain is None:
        return to_table(f, budget).values
    if isinstance(domain, (Subspace, AffineSubspace)):
        return evaluate_points(f, points_array(domain, budget))
    pts = getattr(domain, "point_array", None)
    if pts is not None:
        return evaluate_points(f, pts)
    pts = np.asarray(domain, dtype=np.int64).reshape(-1, f.n)
    check_budget(len(pts), budget)
    return evaluate_points(f, pts)


def level_counts(f: Polynomial, domain=None, budget: int | None = None) -> LevelCounts:
    """Distribution of f over domain (full space when None).

    ``domain`` may be a Subspace, AffineSubspace, ZeroSet, or an explicit
    ``(k, n)`` point array.
    """
    vals = _domain_values(f, domain, budget)
    counts = np.bincount(vals, minlength=f.p)
    return LevelCounts(f.p, tuple(int(c) for c in counts), int(vals.shape[0]))


def squared_modulus(counts: LevelCounts) -> CyclotomicInteger:
    """|S|^2 from the level counts, as an exact cyclotomic integer."""
    p, c = counts.p, counts.counts
    corr = [sum(c[j] * c[(j + d) % p] for j in range(p)) for d in range(p)]
    return CyclotomicInteger.from_exponent_weights(p, corr)


def bias_from_counts(counts: LevelCounts) -> float:
    if counts.domain_size == 0:
        return 0.0
    with mpmath.workdps(40):
        p = counts.p
        s = mpmath.fsum(c * mpmath.expjpi(mpmath.mpf(2 * j) / p) for j, c in enumerate(counts.counts))
        return float(abs(s) / counts.domain_size)


def bias(f: Polynomial, domain=None, budget: int | None = None) -> float:
    """|E_{x in domain} e_p(f(x))|."""
    return bias_from_counts(level_counts(f, domain, budget))


def power_check_counts(counts: LevelCounts, m: int) -> bool:
    """Exactly: |S|^2 * p^m == |D|^2, i.e. bias == p^(-m/2)."""
    sq = squared_modulus(counts)
    return sq.is_rational() and sq.rational_value() * counts.p**m == counts.domain_size**2


def bias_equals_power_check(f: Polynomial, m: int, domain=None, budget: int | None = None) -> bool:
    if degree(f) > 2:
        raise UsageError("exact power check is for polynomials of degree <= 2")
    return power_check_counts(level_counts(f, domain, budget), m)


def bias_report(f: Polynomial, m: int | None = None, domain=None, budget: int | None = None) -> dict:
    counts = level_counts(f, domain, budget)
    out = {"bias_float": bias_from_counts(counts), "counts": list(counts.counts)}
    if m is not None:
        out["exact_power_check"] = {"m": m, "holds": power_check_counts(counts, m)}
    return out
