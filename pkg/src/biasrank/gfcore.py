"""Prime-field scalars, vectors, linear algebra and (affine) subspaces of F_p^n.

Vectors are plain tuples of ints in ``[0, p)``.  Subspaces are stored by a
reduced-row-echelon basis, so two subspaces with the same point set compare
equal.  Points of ``F_p^n`` are indexed in base-p row-major order: the first
coordinate is the most significant digit.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_PRIME = 31
DEFAULT_BUDGET = 2_000_000


class UsageError(ValueError):
    """Malformed input: dimension mismatch, bad modulus, wrong degree."""


class BudgetError(RuntimeError):
    """An enumeration would exceed the configured point budget."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)) or not 3 <= p <= MAX_PRIME:
        raise UsageError(f"modulus must be a prime in [3, {MAX_PRIME}], got {p!r}")
    return int(p)


def check_budget(count: int, budget: int | None) -> None:
    budget = DEFAULT_BUDGET if budget is None else budget
    if count > budget:
        raise BudgetError(f"enumeration of {count} items exceeds budget {budget}")


def inv(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse mod p")
    return pow(a, p - 2, p)


def is_square(a: int, p: int) -> bool:
    """True for nonzero quadratic residues mod p."""
    a %= p
    return a != 0 and pow(a, (p - 1) // 2, p) == 1


def sqrt_mod(a: int, p: int) -> int | None:
    a %= p
    for r in range(p):
        if r * r % p == a:
            return r
    return None


def vec(x: Iterable[int], p: int) -> tuple[int, ...]:
    return tuple(int(v) % p for v in x)


def dot(u: Sequence[int], v: Sequence[int], p: int) -> int:
    return sum(a * b for a, b in zip(u, v)) % p


def vadd(u, v, p):
    return tuple((a + b) % p for a, b in zip(u, v))


def vscale(c, u, p):
    return tuple(c * a % p for a in u)


# --------------------------------------------------------------------------
# point indexing


def point_index(x: Sequence[int], p: int) -> int:
    idx = 0
    for v in x:
        idx = idx * p + int(v)
    return idx


def index_point(idx: int, p: int, n: int) -> tuple[int, ...]:
    out = [0] * n
    for i in range(n - 1, -1, -1):
        idx, out[i] = divmod(idx, p)
    return tuple(out)


def all_points(p: int, n: int, budget: int | None = None) -> np.ndarray:
    """All of F_p^n as a ``(p**n, n)`` array in table order."""
    check_budget(p**n, budget)
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((p,) * n).reshape(n, -1).T
    return grids.astype(np.int64)


def indices_of(points: np.ndarray, p: int) -> np.ndarray:
    n = points.shape[1]
    weights = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return points @ weights


# --------------------------------------------------------------------------
# matrices over F_p (lists of lists of ints)


def rref(rows: Sequence[Sequence[int]], p: int, ncols: int | None = None):
    """Reduced row echelon form.

    Returns ``(rows, pivots)`` with zero rows dropped.  Pivots are only
    searched among the first ``ncols`` columns (all columns by default), which
    is how augmented systems are handled.
    """
    m = [[int(v) % p for v in r] for r in rows]
    if not m:
        return [], []
    width = len(m[0])
    ncols = width if ncols is None else ncols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        s = inv(m[r][c], p)
        m[r] = [v * s % p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    rest = [tuple(row) for row in m[r:] if any(row)]
    return [tuple(row) for row in m[:r]] + rest, pivots


def rank(rows, p: int) -> int:
    return len(rref(rows, p)[1])


def nullspace(rows: Sequence[Sequence[int]], p: int, ncols: int) -> list[tuple[int, ...]]:
    """Basis of ``{x : A x = 0}``, one vector per free column."""
    red, pivots = rref(rows, p) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        x = [0] * ncols
        x[fc] = 1
        for row, pc in zip(red, pivots):
            x[pc] = -row[fc] % p
        basis.append(tuple(x))
    return basis


def solve_matrix(rows: Sequence[Sequence[int]], rhs: Sequence[int], p: int, ncols: int):
    """Solve ``A x = b``.  Returns ``(particular, kernel_basis)`` or None."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, p, ncols) if aug else ([], [])
    # leftover rows are zero on the coefficient part and nonzero in rhs
    if len(red) > len(pivots):
        return None
    x = [0] * ncols
    for row, pc in zip(red, pivots):
        x[pc] = row[-1]
    return tuple(x), nullspace(rows, p, ncols)


def mat_inverse(a: Sequence[Sequence[int]], p: int) -> list[list[int]]:
    n = len(a)
    aug = [list(a[i]) + [int(i == j) for j in range(n)] for i in range(n)]
    red, pivots = rref(aug, p, n)
    if pivots != list(range(n)):
        raise UsageError("matrix is singular mod p")
    return [list(r[n:]) for r in red]


def mat_mul(a, b, p):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(r, c)) % p for c in bt] for r in a]


# --------------------------------------------------------------------------
# linear forms and subspaces


@dataclass(frozen=True)
class LinearForm:
    """Affine-linear function x -> coeffs . x + constant over F_p."""

    p: int
    coeffs: tuple[int, ...]
    constant: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", vec(self.coeffs, self.p))
        object.__setattr__(self, "constant", int(self.constant) % self.p)

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @property
    def homogeneous(self) -> bool:
        return self.constant == 0

    def __call__(self, x: Sequence[int]) -> int:
        if len(x) != self.n:
            raise UsageError("dimension mismatch")
        return (dot(self.coeffs, x, self.p) + self.constant) % self.p

    def scale(self, c: int) -> "LinearForm":
        return LinearForm(self.p, vscale(c, self.coeffs, self.p), c * self.constant)

    def to_json(self):
        return {"coeffs": list(self.coeffs), "constant": self.constant}


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of F_p^n held by its canonical RREF basis."""

    p: int
    n: int
    basis: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        red, _ = rref(self.basis, self.p) if self.basis else ([], [])
        for row in red:
            if len(row) != self.n:
                raise UsageError("basis vector has wrong length")
        object.__setattr__(self, "basis", tuple(red))

    @classmethod
    def span(cls, p: int, n: int, vectors: Iterable[Sequence[int]]) -> "Subspace":
        return cls(p, n, tuple(tuple(v) for v in vectors))

    @classmethod
    def full(cls, p: int, n: int) -> "Subspace":
        return cls(p, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, p: int, n: int) -> "Subspace":
        return cls(p, n, ())

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def codim(self) -> int:
        return self.n - self.dim

    @property
    def pivots(self) -> list[int]:
        return [next(i for i, v in enumerate(row) if v) for row in self.basis]

    def __len__(self) -> int:
        return self.p**self.dim

    def contains(self, x: Sequence[int]) -> bool:
        if len(x) != self.n:
            raise UsageError("dimension mismatch")
        return rank(list(self.basis) + [tuple(x)], self.p) == self.dim

    __contains__ = contains

    def coordinates(self, x: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of a member in the RREF basis (read off at pivots)."""
        return tuple(int(x[c]) % self.p for c in self.pivots)

    def point(self, coords: Sequence[int]) -> tuple[int, ...]:
        out = [0] * self.n
        for c, row in zip(coords, self.basis):
            for i, v in enumerate(row):
                out[i] += c * v
        return vec(out, self.p)

    def annihilator(self) -> list[tuple[int, ...]]:
        """Coefficient vectors of a basis of the linear forms vanishing on self."""
        return nullspace(list(self.basis), self.p, self.n)

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(b) for b in self.basis)

    def points(self, budget: int | None = None) -> np.ndarray:
        return points_array(self, budget)

    def to_json(self):
        return {"ambient": self.n, "basis": [list(b) for b in self.basis]}

    @classmethod
    def from_json(cls, p: int, data) -> "Subspace":
        return cls.span(p, data["ambient"], data["basis"])


@dataclass(frozen=True)
class AffineSubspace:
    """offset + direction, with offset the lexicographically least member."""

    offset: tuple[int, ...]
    direction: Subspace

    def __post_init__(self):
        d = self.direction
        if len(self.offset) != d.n:
            raise UsageError("offset has wrong length")
        off = list(vec(self.offset, d.p))
        for row, pc in zip(d.basis, d.pivots):
            c = off[pc]
            if c:
                off = [(a - c * b) % d.p for a, b in zip(off, row)]
        object.__setattr__(self, "offset", tuple(off))

    @property
    def p(self) -> int:
        return self.direction.p

    @property
    def n(self) -> int:
        return self.direction.n

    @property
    def dim(self) -> int:
        return self.direction.dim

    @property
    def codim(self) -> int:
        return self.direction.codim

    def __len__(self) -> int:
        return len(self.direction)

    def contains(self, x: Sequence[int]) -> bool:
        diff = tuple((a - b) % self.p for a, b in zip(x, self.offset))
        return self.direction.contains(diff)

    __contains__ = contains

    def point(self, coords):
        return vadd(self.offset, self.direction.point(coords), self.p)

    def points(self, budget: int | None = None) -> np.ndarray:
        return points_array(self, budget)

    def to_json(self):
        return {"offset": list(self.offset), **self.direction.to_json()}


def solve_linear_system(rows: Sequence[LinearForm], targets: Sequence[int]):
    """Solve ``rows[i](x) = targets[i]`` for all i.

    Returns None if inconsistent, else ``(particular, kernel)`` where the
    kernel is a canonical Subspace.
    """
    if not rows:
        raise UsageError("empty system has no ambient dimension")
    p, n = rows[0].p, rows[0].n
    if any(r.n != n or r.p != p for r in rows) or len(targets) != len(rows):
        raise UsageError("dimension mismatch in linear system")
    rhs = [(t - r.constant) % p for r, t in zip(rows, targets)]
    res = solve_matrix([r.coeffs for r in rows], rhs, p, n)
    if res is None:
        return None
    x, kern = res
    return x, Subspace.span(p, n, kern)


def annihilator_subspace(forms: Sequence[LinearForm], p: int | None = None, n: int | None = None) -> Subspace:
    """Common kernel of homogeneous linear forms."""
    if forms:
        p, n = forms[0].p, forms[0].n
    if p is None or n is None:
        raise UsageError("ambient dimension unknown for empty form list")
    for f in forms:
        if not f.homogeneous:
            raise UsageError("annihilator needs homogeneous forms")
        if f.n != n:
            raise UsageError("dimension mismatch")
    return Subspace.span(p, n, nullspace([f.coeffs for f in forms], p, n))


def forms_kernel(p: int, n: int, coeff_rows: Sequence[Sequence[int]]) -> Subspace:
    return Subspace.span(p, n, nullspace(list(coeff_rows), p, n))


def intersect_subspaces(s1: Subspace, s2: Subspace) -> Subspace:
    if s1.n != s2.n or s1.p != s2.p:
        raise UsageError("ambient mismatch")
    return forms_kernel(s1.p, s1.n, s1.annihilator() + s2.annihilator())


def sum_subspaces(s1: Subspace, s2: Subspace) -> Subspace:
    if s1.n != s2.n or s1.p != s2.p:
        raise UsageError("ambient mismatch")
    return Subspace.span(s1.p, s1.n, s1.basis + s2.basis)


def enumerate_points(s: Subspace | AffineSubspace, budget: int | None = None) -> Iterator[tuple[int, ...]]:
    """Yield the points of s; basis coefficients run as a base-p counter."""
    direction = s.direction if isinstance(s, AffineSubspace) else s
    offset = s.offset if isinstance(s, AffineSubspace) else (0,) * s.n
    check_budget(len(direction), budget)
    p = direction.p
    for coeffs in product(range(p), repeat=direction.dim):
        yield vadd(offset, direction.point(coeffs), p)


def points_array(s: Subspace | AffineSubspace, budget: int | None = None) -> np.ndarray:
    """Same order as enumerate_points, as an int64 array."""
    direction = s.direction if isinstance(s, AffineSubspace) else s
    check_budget(len(direction), budget)
    p = direction.p
    coeffs = all_points(p, direction.dim, budget)
    if direction.dim:
        pts = coeffs @ np.array(direction.basis, dtype=np.int64)
    else:
        pts = np.zeros((1, direction.n), dtype=np.int64)
    if isinstance(s, AffineSubspace):
        pts = pts + np.array(s.offset, dtype=np.int64)
    return pts % p


def projective_points(p: int, n: int) -> list[tuple[int, ...]]:
    """Nonzero vectors whose first nonzero coordinate is 1."""
    out = []
    for x in product(range(p), repeat=n):
        nz = next((v for v in x if v), 0)
        if nz == 1:
            out.append(x)
    return out


def subspaces_of_dim(p: int, n: int, k: int) -> Iterator[Subspace]:
    """All k-dimensional subspaces of F_p^n, via their RREF bases."""
    from itertools import combinations

    for pivots in combinations(range(n), k):
        free_slots = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pivots]
        for vals in product(range(p), repeat=len(free_slots)):
            rows = [[0] * n for _ in range(k)]
            for r, pc in enumerate(pivots):
                rows[r][pc] = 1
            for (r, c), v in zip(free_slots, vals):
                rows[r][c] = v
            yield Subspace(p, n, tuple(tuple(r) for r in rows))
