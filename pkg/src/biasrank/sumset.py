"""Representation counts, Fourier spectra and Bogolyubov-type subspaces in F_p^n."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .gfcore import (
    Subspace,
    UsageError,
    all_points,
    check_budget,
    check_prime,
    forms_kernel,
    indices_of,
    points_array,
)


@dataclass(frozen=True, eq=False)
class GroupSubset:
    """Subset of F_p^n as a boolean table in base-p row-major point order."""

    p: int
    n: int
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=bool).reshape(-1)
        if t.shape[0] != self.p**self.n:
            raise UsageError("membership table has the wrong size")
        object.__setattr__(self, "table", t)

    @classmethod
    def from_indices(cls, p: int, n: int, indices: Iterable[int]) -> "GroupSubset":
        t = np.zeros(p**n, dtype=bool)
        t[np.asarray(list(indices), dtype=np.int64)] = True
        return cls(p, n, t)

    @classmethod
    def from_points(cls, p: int, n: int, pts) -> "GroupSubset":
        pts = np.asarray(pts, dtype=np.int64).reshape(-1, n) % p
        return cls.from_indices(p, n, indices_of(pts, p) if len(pts) else [])

    @classmethod
    def from_subspace(cls, s: Subspace) -> "GroupSubset":
        return cls.from_points(s.p, s.n, points_array(s))

    @classmethod
    def full(cls, p: int, n: int) -> "GroupSubset":
        return cls(p, n, np.ones(p**n, dtype=bool))

    @property
    def size(self) -> int:
        return int(np.count_nonzero(self.table))

    def __len__(self) -> int:
        return self.size

    @property
    def density(self) -> float:
        return self.size / self.p**self.n

    @property
    def indices(self) -> np.ndarray:
        return np.nonzero(self.table)[0]

    @property
    def point_array(self) -> np.ndarray:
        return all_points(self.p, self.n)[self.indices]

    def __contains__(self, x: Sequence[int]) -> bool:
        return bool(self.table[indices_of(np.asarray([x], dtype=np.int64) % self.p, self.p)[0]])

    def to_json(self):
        return {"p": self.p, "n": self.n, "points": self.indices.tolist()}

    @classmethod
    def from_json(cls, data) -> "GroupSubset":
        return cls.from_indices(data["p"], data["n"], data["points"])


@dataclass(frozen=True, eq=False)
class RepProfile:
    """r_b(t) = #{t = y_1+..+y_b - z_1-..-z_b, all y, z in E}."""

    p: int
    n: int
    b: int
    counts: np.ndarray

    def at(self, x: Sequence[int]) -> int:
        return int(self.counts[indices_of(np.asarray([x], dtype=np.int64) % self.p, self.p)[0]])

    @property
    def support(self) -> np.ndarray:
        return np.nonzero(self.counts)[0]


def _index_tables(p: int, n: int):
    pts = all_points(p, n)
    neg = indices_of((-pts) % p, p)
    return pts, neg


def _convolve(a: np.ndarray, b: np.ndarray, pts: np.ndarray, p: int) -> np.ndarray:
    """(a * b)(t) = sum_x a(x) b(t - x), exact in Python integers via object arrays."""
    size = len(a)
    out = np.zeros(size, dtype=object)
    nz = np.nonzero(a)[0]
    for x in nz:
        # index of t - x for all t is a fixed permutation of the table
        perm = indices_of((pts - pts[x]) % p, p)
        out = out + a[x] * b[perm]
    return out


def rep_counts(E: GroupSubset, b: int, budget: int | None = None) -> RepProfile:
    """Exact representation counts by iterated convolution."""
    if not 1 <= b <= 3:
        raise UsageError("b must be 1, 2 or 3")
    p, n = E.p, E.n
    size = p**n
    check_budget(size * size, budget)
    pts, neg = _index_tables(p, n)
    e = E.table.astype(object) * 1
    r1 = _convolve(e, e[neg], pts, p)
    r = r1
    for _ in range(b - 1):
        r = _convolve(r, r1, pts, p)
    return RepProfile(p, n, b, np.array([int(v) for v in r], dtype=object))


def rep_counts_fft(E: GroupSubset, b: int) -> tuple[np.ndarray, float]:
    """Same counts through the DFT on Z_p^n, rounded; also returns the largest rounding gap."""
    p, n = E.p, E.n
    e = E.table.astype(np.float64).reshape((p,) * n)
    ft = np.fft.fftn(e)
    spec = (np.abs(ft) ** 2) ** b
    vals = np.real(np.fft.ifftn(spec)).reshape(-1)
    return np.rint(vals).astype(np.int64), float(np.max(np.abs(vals - np.rint(vals))))


def fourier_coefficients(E: GroupSubset) -> np.ndarray:
    """|E^(xi)| = |sum_{x in E} e_p(xi . x)| for every xi, in point order."""
    p, n = E.p, E.n
    ft = np.fft.fftn(E.table.astype(np.float64).reshape((p,) * n))
    return np.abs(ft).reshape(-1)


def spectrum(E: GroupSubset, gamma: float) -> list[tuple[int, ...]]:
    """All xi with |E^(xi)| >= gamma |E| (guard band 1e-9)."""
    if gamma <= 0:
        raise UsageError("gamma must be positive")
    check_prime(E.p)
    mags = fourier_coefficients(E)
    keep = mags >= gamma * E.size - 1e-9
    keep[0] = True
    pts = all_points(E.p, E.n)
    return [tuple(int(v) for v in pts[i]) for i in np.nonzero(keep)[0]]


@dataclass
class BogolyubovResult:
    b: int
    U: Subspace
    min_reps: int
    C: float
    gamma: float
    spectrum_size: int

    def to_json(self):
        return {
            "b": self.b,
            "U": self.U.to_json(),
            "codim": self.U.codim,
            "min_reps": self.min_reps,
            "C": self.C,
            "gamma": self.gamma,
            "spectrum_size": self.spectrum_size,
        }


def gamma_schedule(mu: float, b: int) -> float:
    """Spectrum threshold tried at step b: (mu/2)^(1/max(1, 2b-2))."""
    return (mu / 2) ** (1.0 / max(1, 2 * b - 2))


def verify_containment(E: GroupSubset, b: int, U: Subspace, profile: RepProfile | None = None) -> int:
    """Least r_b(t) over t in U (positive iff U lies in bE - bE)."""
    prof = profile if profile is not None else rep_counts(E, b)
    idx = indices_of(points_array(U), E.p)
    return int(min(prof.counts[i] for i in idx))


def bogolyubov_search(
    E: GroupSubset, max_b: int = 3, max_codim: int = 3, budget: int | None = None
) -> BogolyubovResult | None:
    """Find b and U = (Spec E)^perp with every point of U represented in bE - bE.

    Every returned subspace has been checked point by point against the
    exact representation counts.
    """
    if E.size == 0:
        raise UsageError("E must be nonempty")
    p, n = E.p, E.n
    mu = E.density
    for b in range(1, max_b + 1):
        gamma = gamma_schedule(mu, b)
        spec = spectrum(E, gamma)
        U = forms_kernel(p, n, spec)
        if U.codim > max_codim:
            continue
        prof = rep_counts(E, b, budget)
        m = verify_containment(E, b, U, prof)
        if m > 0:
            return BogolyubovResult(b, U, m, m / len(U) ** (2 * b - 1), gamma, len(spec))
    return None
