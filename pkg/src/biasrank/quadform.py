"""Quadratic polynomials as forms over F_p (p odd).

The Schmidt rank of a quadratic only depends on its homogeneous part.  It is
computed constructively: diagonalize, then split off hyperbolic planes until
at most two anisotropic squares remain.  With h hyperbolic planes and a
anisotropic squares the rank is ``h + a``, which gives

* ``ceil(m/2)`` for odd Gram rank m,
* ``m/2`` for even m when the form is hyperbolic,
* ``m/2 + 1`` for even m otherwise.

Every certificate is re-expanded and compared with the input before it is
returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .gfcore import LinearForm, UsageError, inv, is_square, mat_inverse, sqrt_mod, vec
from .poly import Polynomial, degree, homogeneous_part, monomials


@dataclass(frozen=True)
class QuadraticPoly:
    """sum_{i<=j} g_ij x_i x_j + linear . x + constant.

    ``upper[i][j]`` holds g_ij for i <= j; entries below the diagonal are 0.
    """

    p: int
    upper: tuple[tuple[int, ...], ...]
    linear: tuple[int, ...]
    constant: int = 0

    def __post_init__(self):
        p = self.p
        if p % 2 == 0:
            raise UsageError("quadratic forms need an odd prime")
        n = len(self.linear)
        up = tuple(tuple(int(self.upper[i][j]) % p if j >= i else 0 for j in range(n)) for i in range(n))
        object.__setattr__(self, "upper", up)
        object.__setattr__(self, "linear", vec(self.linear, p))
        object.__setattr__(self, "constant", int(self.constant) % p)

    @property
    def n(self) -> int:
        return len(self.linear)

    @classmethod
    def from_poly(cls, f: Polynomial) -> "QuadraticPoly":
        if degree(f) > 2:
            raise UsageError("polynomial has degree > 2")
        n = f.n
        up = [[0] * n for _ in range(n)]
        lin = [0] * n
        const = 0
        for e, c in f.terms:
            idx = [i for i, k in enumerate(e) for _ in range(k)]
            if len(idx) == 2:
                up[idx[0]][idx[1]] = c
            elif len(idx) == 1:
                lin[idx[0]] = c
            else:
                const = c
        return cls(f.p, tuple(map(tuple, up)), tuple(lin), const)

    @classmethod
    def from_gram(cls, p: int, gram: Sequence[Sequence[int]]) -> "QuadraticPoly":
        """Homogeneous quadratic whose pairing matrix is ``gram``."""
        n = len(gram)
        h = inv(2, p)
        up = [[(gram[i][i] * h if i == j else gram[i][j]) if j >= i else 0 for j in range(n)] for i in range(n)]
        return cls(p, tuple(map(tuple, up)), (0,) * n, 0)

    def to_poly(self) -> Polynomial:
        n = self.n
        terms = {}
        for i in range(n):
            for j in range(i, n):
                e = [0] * n
                e[i] += 1
                e[j] += 1
                terms[tuple(e)] = self.upper[i][j]
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = self.linear[i]
        terms[(0,) * n] = self.constant
        return Polynomial(self.p, n, terms)

    def homogeneous(self) -> "QuadraticPoly":
        return QuadraticPoly(self.p, self.upper, (0,) * self.n, 0)

    @property
    def is_homogeneous(self) -> bool:
        return not any(self.linear) and self.constant == 0

    def __call__(self, x: Sequence[int]) -> int:
        p, n = self.p, self.n
        s = self.constant + sum(a * b for a, b in zip(self.linear, x))
        for i in range(n):
            if x[i]:
                s += x[i] * sum(self.upper[i][j] * x[j] for j in range(i, n))
        return s % p

    def __add__(self, other):
        p, n = self.p, self.n
        return QuadraticPoly(
            p,
            tuple(tuple(self.upper[i][j] + other.upper[i][j] for j in range(n)) for i in range(n)),
            tuple(a + b for a, b in zip(self.linear, other.linear)),
            self.constant + other.constant,
        )

    def scale(self, c: int) -> "QuadraticPoly":
        return QuadraticPoly(
            self.p,
            tuple(tuple(c * v for v in row) for row in self.upper),
            tuple(c * v for v in self.linear),
            c * self.constant,
        )

    def gram_matrix(self) -> list[list[int]]:
        """M[i][j] = (e_i, e_j)_Q; the diagonal is twice the square coefficient."""
        p, n = self.p, self.n
        m = [[0] * n for _ in range(n)]
        for i in range(n):
            m[i][i] = 2 * self.upper[i][i] % p
            for j in range(i + 1, n):
                m[i][j] = m[j][i] = self.upper[i][j]
        return m

    def vector(self) -> tuple[int, ...]:
        """Homogeneous coefficients in the order of ``monomials(n, 2)``."""
        out = []
        for e in monomials(self.n, 2):
            idx = [i for i, k in enumerate(e) for _ in range(k)]
            out.append(self.upper[idx[0]][idx[1]])
        return tuple(out)

    @classmethod
    def from_vector(cls, p: int, n: int, v: Sequence[int]) -> "QuadraticPoly":
        up = [[0] * n for _ in range(n)]
        for e, c in zip(monomials(n, 2), v):
            idx = [i for i, k in enumerate(e) for _ in range(k)]
            up[idx[0]][idx[1]] = c
        return cls(p, tuple(map(tuple, up)), (0,) * n, 0)

    def to_json(self):
        return {"p": self.p, "n": self.n, "poly": str(self.to_poly())}


def as_quadratic(q) -> QuadraticPoly:
    return q if isinstance(q, QuadraticPoly) else QuadraticPoly.from_poly(q)


def gram_pair(q: QuadraticPoly, s: Sequence[int], t: Sequence[int]) -> int:
    """(s, t)_Q = Q_h(s + t) - Q_h(s) - Q_h(t) for the homogeneous part Q_h."""
    q = as_quadratic(q)
    if len(s) != q.n or len(t) != q.n:
        raise UsageError("dimension mismatch")
    m = q.gram_matrix()
    return sum(s[i] * m[i][j] * t[j] for i in range(q.n) for j in range(q.n)) % q.p


def regularity_pairing_forms(q: QuadraticPoly, t: Sequence[int]) -> LinearForm:
    """The homogeneous linear form x -> (t, x)_Q."""
    q = as_quadratic(q)
    if len(t) != q.n:
        raise UsageError("dimension mismatch")
    m = q.gram_matrix()
    return LinearForm(q.p, tuple(sum(t[i] * m[i][j] for i in range(q.n)) for j in range(q.n)))


def gram_rank(q: QuadraticPoly) -> int:
    from .gfcore import rank

    q = as_quadratic(q)
    return rank(q.gram_matrix(), q.p) if q.n else 0


# --------------------------------------------------------------------------
# diagonalization and Witt splitting


def _bilinear(a, u, v, p):
    n = len(u)
    return sum(u[i] * a[i][j] * v[j] for i in range(n) for j in range(n)) % p


def diagonalize(q: QuadraticPoly):
    """Orthogonal basis for the form x^T A x with A = Gram/2.

    Returns ``(nonzero, radical)`` where ``nonzero`` lists ``(v, q(v))`` with
    ``q(v) != 0`` and ``radical`` lists vectors with q(v) = 0 orthogonal to all.
    """
    p, n = q.p, q.n
    half = inv(2, p)
    g = q.gram_matrix()
    a = [[g[i][j] * half % p for j in range(n)] for i in range(n)]
    work = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    nonzero = []
    while work:
        pick = None
        for i, u in enumerate(work):
            if _bilinear(a, u, u, p):
                pick = (i, u)
                break
        if pick is None:
            for i in range(len(work)):
                for j in range(i + 1, len(work)):
                    if _bilinear(a, work[i], work[j], p):
                        v = tuple((x + y) % p for x, y in zip(work[i], work[j]))
                        pick = (i, v)
                        break
                if pick is not None:
                    break
        if pick is None:
            return nonzero, work
        i, v = pick
        d = _bilinear(a, v, v, p)
        dinv = inv(d, p)
        rest = []
        for k, u in enumerate(work):
            if k == i:
                continue
            c = _bilinear(a, u, v, p) * dinv % p
            rest.append(tuple((x - c * y) % p for x, y in zip(u, v)))
        nonzero.append((v, d))
        work = rest
    return nonzero, []


def witt_split(q: QuadraticPoly):
    """Split the nondegenerate part into hyperbolic pairs and <= 2 anisotropic vectors.

    Returns ``(pairs, aniso, radical)``: pairs ``(u, w)`` with q(u)=q(w)=0 and
    B(u, w) = 1/2 so q(s u + t w) = s t; aniso ``(z, q(z))``.
    """
    p = q.p
    half = inv(2, p)
    g = q.gram_matrix()
    a = [[g[i][j] * half % p for j in range(q.n)] for i in range(q.n)]
    diag, radical = diagonalize(q)
    pairs = []

    def lin(*terms):
        out = [0] * q.n
        for c, v in terms:
            for k, x in enumerate(v):
                out[k] = (out[k] + c * x) % p
        return tuple(out)

    def hyperbolic_pair(u, y):
        # u isotropic, y with B(u, y) != 0; returns (u, w) with B(u,w)=1/2, q(w)=0
        b = _bilinear(a, u, y, p)
        qy = _bilinear(a, y, y, p)
        w = lin((1, y), (-qy * inv(2 * b, p), u))
        w = lin((inv(2 * b, p), w))
        return u, w

    while len(diag) >= 2:
        found = None
        for i in range(len(diag)):
            for j in range(i + 1, len(diag)):
                (va, da), (vb, db) = diag[i], diag[j]
                c = sqrt_mod(-da * inv(db, p), p)
                if c is not None:
                    u = lin((1, va), (c, vb))
                    found = ([i, j], hyperbolic_pair(u, va), None)
                    break
            if found:
                break
        if found is None and len(diag) >= 3:
            (va, da), (vb, db), (vc, dc) = diag[:3]
            sol = next(
                ((x, y) for x in range(p) for y in range(p) if (da * x * x + db * y * y + dc) % p == 0),
                None,
            )
            assert sol is not None, "ternary forms over F_p are isotropic"
            u = lin((sol[0], va), (sol[1], vb), (1, vc))
            u, w = hyperbolic_pair(u, vc)
            z = None
            for y in (va, vb, vc):
                cand = lin((1, y), (-2 * _bilinear(a, y, w, p), u), (-2 * _bilinear(a, y, u, p), w))
                if any(cand):
                    z = cand
                    break
            found = ([0, 1, 2], (u, w), (z, _bilinear(a, z, z, p)))
        if found is None:
            break
        idx, pair, extra = found
        pairs.append(pair)
        diag = [d for k, d in enumerate(diag) if k not in idx]
        if extra is not None:
            diag.insert(0, extra)
    return pairs, diag, radical


@dataclass
class RankCertificate:
    gram_rank: int
    witt: str
    schmidt_rank: int
    factors: list[tuple[LinearForm, LinearForm]] = field(default_factory=list)
    remainder: Polynomial | None = None

    def expand(self, p: int, n: int) -> Polynomial:
        total = self.remainder if self.remainder is not None else Polynomial.zero(p, n)
        for a, b in self.factors:
            total = total + Polynomial.linear(p, a.coeffs, a.constant) * Polynomial.linear(p, b.coeffs, b.constant)
        return total

    def to_json(self):
        return {
            "m": self.gram_rank,
            "witt": self.witt,
            "r": self.schmidt_rank,
            "factors": [[a.to_json(), b.to_json()] for a, b in self.factors],
            "remainder": str(self.remainder),
        }


def witt_type(q: QuadraticPoly) -> str:
    """'odd', 'hyperbolic' or 'nonhyperbolic' from the discriminant."""
    diag, _ = diagonalize(as_quadratic(q))
    m = len(diag)
    if m % 2:
        return "odd"
    prod = 1
    for _, d in diag:
        prod = prod * d % q.p
    sign = 1 if (m // 2) % 2 == 0 else -1
    return "hyperbolic" if m == 0 or is_square(sign * prod, q.p) else "nonhyperbolic"


def schmidt_rank(q) -> RankCertificate:
    q = as_quadratic(q)
    p, n = q.p, q.n
    pairs, aniso, radical = witt_split(q)
    m = 2 * len(pairs) + len(aniso)
    witt = witt_type(q)
    if (witt == "hyperbolic") != (m % 2 == 0 and not aniso):
        raise AssertionError("discriminant test disagrees with the Witt splitting")
    # coordinates in the new basis are the rows of its inverse
    cols = [v for pr in pairs for v in pr] + [z for z, _ in aniso] + list(radical)
    tinv = mat_inverse([list(r) for r in zip(*cols)], p) if n else []
    forms = [LinearForm(p, tuple(row)) for row in tinv]
    factors = []
    for k in range(len(pairs)):
        factors.append((forms[2 * k], forms[2 * k + 1]))
    base = 2 * len(pairs)
    for k, (_, c) in enumerate(aniso):
        z = forms[base + k]
        factors.append((z.scale(c), z))
    f = q.to_poly()
    cert = RankCertificate(m, witt, len(factors), factors, None)
    cert.remainder = f - cert.expand(p, n)
    if degree(cert.remainder) > 1 or cert.expand(p, n) != f:
        raise AssertionError("certificate does not re-expand to the input")
    return cert


def schmidt_rank_value(q) -> int:
    """Rank from the closed formula (no decomposition)."""
    q = as_quadratic(q)
    m = gram_rank(q)
    if m % 2:
        return (m + 1) // 2
    return m // 2 if witt_type(q) == "hyperbolic" else m // 2 + 1


def top_quadratic(f: Polynomial) -> QuadraticPoly:
    return QuadraticPoly.from_poly(homogeneous_part(f, 2))
