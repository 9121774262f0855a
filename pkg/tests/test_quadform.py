import pytest
from hypothesis import given
from hypothesis import strategies as st

from biasrank.charsum import level_counts, power_check_counts, squared_modulus
from biasrank.gfcore import UsageError, mat_mul
from biasrank.harness.generators import SplitMix64, random_poly
from biasrank.poly import Polynomial, degree
from biasrank.quadform import (
    QuadraticPoly,
    diagonalize,
    gram_pair,
    gram_rank,
    schmidt_rank,
    schmidt_rank_value,
    witt_type,
)

seeds = st.integers(0, 2**40)
primes = st.sampled_from([3, 5, 7])


def q(text, p=5, n=2):
    return QuadraticPoly.from_poly(Polynomial.parse(text, p, n))


def rquad(seed, p=5, n=3):
    return QuadraticPoly.from_poly(random_poly(SplitMix64(seed), p, n, 2))


def test_hyperbolic_plane():
    c = schmidt_rank(q("x1*x2"))
    assert (c.gram_rank, c.witt, c.schmidt_rank) == (2, "hyperbolic", 1)


def test_sum_of_squares_splits_at_5():
    c = schmidt_rank(q("x1^2 + x2^2"))
    assert (c.gram_rank, c.witt, c.schmidt_rank) == (2, "hyperbolic", 1)
    assert c.expand(5, 2) == Polynomial.parse("x1^2 + x2^2", 5, 2)
    assert Polynomial.parse("x1 + 2*x2", 5, 2) * Polynomial.parse("x1 - 2*x2", 5, 2) == Polynomial.parse("x1^2 + x2^2", 5, 2)


def test_nonhyperbolic_plane():
    c = schmidt_rank(q("x1^2 + 2*x2^2"))
    assert (c.gram_rank, c.witt, c.schmidt_rank) == (2, "nonhyperbolic", 2)


def test_single_square():
    c = schmidt_rank(q("x1^2"))
    assert (c.gram_rank, c.witt, c.schmidt_rank) == (1, "odd", 1)


def test_affine_terms_go_to_the_remainder():
    f = Polynomial.parse("x1*x2 + 3*x1 + 2", 5, 2)
    c = schmidt_rank(QuadraticPoly.from_poly(f))
    assert c.schmidt_rank == 1
    assert degree(c.remainder) <= 1
    assert c.expand(5, 2) == f


def test_degree_above_two_is_rejected():
    with pytest.raises(UsageError):
        QuadraticPoly.from_poly(Polynomial.parse("x1^3", 5, 1))


@given(seeds, primes)
def test_certificate_re_expands(seed, p):
    Q = rquad(seed, p)
    c = schmidt_rank(Q)
    assert c.expand(p, 3) == Q.to_poly()
    assert c.schmidt_rank == len(c.factors) == schmidt_rank_value(Q)
    assert c.schmidt_rank <= c.gram_rank


@given(seeds, st.data())
def test_polarization(seed, data):
    Q = rquad(seed)
    s = data.draw(st.tuples(*[st.integers(0, 4)] * 3))
    h = Q.homogeneous()
    assert gram_pair(Q, s, s) == 2 * h(s) % 5


@given(seeds, st.data())
def test_pairing_is_bilinear_symmetric(seed, data):
    Q = rquad(seed)
    v = st.tuples(*[st.integers(0, 4)] * 3)
    s, t, u = data.draw(v), data.draw(v), data.draw(v)
    assert gram_pair(Q, s, t) == gram_pair(Q, t, s)
    st_sum = tuple((a + b) % 5 for a, b in zip(s, t))
    assert gram_pair(Q, st_sum, u) == (gram_pair(Q, s, u) + gram_pair(Q, t, u)) % 5


@given(seeds)
def test_diagonalization_is_a_congruence(seed):
    Q = rquad(seed)
    diag, radical = diagonalize(Q)
    assert len(diag) == gram_rank(Q)
    A = [[c * 3 % 5 for c in row] for row in Q.gram_matrix()]  # Gram / 2
    for v, d in diag:
        assert sum(v[a] * A[a][b] * v[b] for a in range(3) for b in range(3)) % 5 == d % 5
    for z in radical:
        assert all(gram_pair(Q, z, v) == 0 for v, _ in diag)


@given(seeds, primes)
def test_gauss_sum_law(seed, p):
    Q = rquad(seed, p)
    counts = level_counts(Q.to_poly())
    m = gram_rank(Q)
    assert squared_modulus(counts) == 0 or power_check_counts(counts, m)


def test_witt_type_depends_on_the_field():
    assert witt_type(q("x1^2 + x2^2", p=3)) == "nonhyperbolic"
    assert witt_type(q("x1^2 + x2^2", p=5)) == "hyperbolic"
    assert witt_type(q("x1^2 + x2^2", p=7)) == "nonhyperbolic"


def test_gram_matrix_round_trip():
    Q = q("x1^2 + 3*x1*x2 + 4*x2^2")
    assert QuadraticPoly.from_gram(5, Q.gram_matrix()) == Q.homogeneous()
    assert mat_mul(Q.gram_matrix(), [[1, 0], [0, 1]], 5) == Q.gram_matrix()
