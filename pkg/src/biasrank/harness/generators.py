"""Seeded, reproducible generation of polynomials, subsets and subspaces.

All randomness comes from SplitMix64: the state advances by the odd
constant 0x9E3779B97F4A7C15 and each output is the state passed through the
standard two-multiply finalizer.  The same GeneratorSpec therefore always
produces bit-identical artifacts, independent of numpy or Python versions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..gfcore import Subspace, UsageError, check_prime, forms_kernel, rank
from ..poly import Polynomial, homogeneous_part, monomials
from ..sumset import GroupSubset

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, m: int) -> int:
        """Uniform integer in [0, m) by rejection."""
        if m <= 0:
            raise UsageError("range must be positive")
        limit = (1 << 64) - ((1 << 64) % m)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % m

    def vector(self, m: int, length: int) -> tuple[int, ...]:
        return tuple(self.below(m) for _ in range(length))

    def sample(self, population: int, k: int) -> list[int]:
        """k distinct integers from range(population), partial Fisher-Yates."""
        if not 0 <= k <= population:
            raise UsageError("sample size out of range")
        pool = list(range(population))
        for i in range(k):
            j = i + self.below(population - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def fork(self, label: int) -> "SplitMix64":
        """An independent stream derived from this one and ``label``."""
        return SplitMix64(self.next_u64() ^ ((label * GOLDEN) & MASK64))


KINDS = ("random-poly", "structured-quartic", "random-subset", "random-subspace")


@dataclass(frozen=True)
class GeneratorSpec:
    seed: int
    kind: str
    p: int = 5
    n: int = 3
    degree: int = 4
    k: int = 1
    mu: float = 0.5
    codim: int = 1
    homogeneous: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown generator kind {self.kind!r}")
        check_prime(self.p)
        if self.n < 0:
            raise UsageError("n must be nonnegative")

    def to_json(self):
        return dict(self.__dict__)


@dataclass
class StructuredQuartic:
    """f = sum_i Q_i Q'_i + (lower-degree noise) with the quadratics kept."""

    poly: Polynomial
    family: list[Polynomial] = field(default_factory=list)

    def to_json(self):
        return {"poly": str(self.poly), "family": [str(q) for q in self.family]}


def random_poly(rng: SplitMix64, p: int, n: int, d: int, exact_degree: bool = True, homogeneous: bool = False) -> Polynomial:
    """Uniform coefficients on every monomial of degree <= d (only degree d if homogeneous)."""
    if d >= p and d > 1:
        raise UsageError("degree must stay below p")
    terms = {}
    degs = [d] if homogeneous else range(d + 1)
    for e in degs:
        for m in monomials(n, e):
            terms[m] = rng.below(p)
    f = Polynomial(p, n, terms)
    if exact_degree and d > 0 and n > 0 and not homogeneous_part(f, d):
        top = monomials(n, d)
        f = f + Polynomial(p, n, {top[rng.below(len(top))]: 1 + rng.below(p - 1)})
    return f


def random_quadratic_form(rng: SplitMix64, p: int, n: int) -> Polynomial:
    return random_poly(rng, p, n, 2, exact_degree=True, homogeneous=True)


def structured_quartic(rng: SplitMix64, p: int, n: int, k: int, noise: bool = True) -> StructuredQuartic:
    family = []
    f = Polynomial.zero(p, n)
    for _ in range(k):
        q, q2 = random_quadratic_form(rng, p, n), random_quadratic_form(rng, p, n)
        family += [q, q2]
        f = f + q * q2
    if noise:
        f = f + random_poly(rng, p, n, 3, exact_degree=False)
    return StructuredQuartic(f, family)


def random_subset(rng: SplitMix64, p: int, n: int, mu: float) -> GroupSubset:
    """Exactly floor(mu * p^n) points, drawn without replacement."""
    if not 0 <= mu <= 1:
        raise UsageError("density must lie in [0, 1]")
    size = p**n
    k = int(np.floor(mu * size + 1e-12))
    return GroupSubset.from_indices(p, n, rng.sample(size, k))


def random_subspace(rng: SplitMix64, p: int, n: int, codim: int) -> Subspace:
    """Kernel of ``codim`` random independent linear forms."""
    if not 0 <= codim <= n:
        raise UsageError("codimension out of range")
    forms: list[tuple[int, ...]] = []
    while len(forms) < codim:
        v = rng.vector(p, n)
        if rank(forms + [v], p) == len(forms) + 1:
            forms.append(v)
    return forms_kernel(p, n, forms)


def generate(spec: GeneratorSpec):
    rng = SplitMix64(spec.seed)
    if spec.kind == "random-poly":
        return random_poly(rng, spec.p, spec.n, spec.degree, homogeneous=spec.homogeneous)
    if spec.kind == "structured-quartic":
        return structured_quartic(rng, spec.p, spec.n, spec.k)
    if spec.kind == "random-subset":
        return random_subset(rng, spec.p, spec.n, spec.mu)
    return random_subspace(rng, spec.p, spec.n, spec.codim)
