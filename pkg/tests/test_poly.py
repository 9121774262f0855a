import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biasrank.gfcore import Subspace, UsageError, all_points, points_array
from biasrank.harness.generators import SplitMix64, random_poly, random_subspace
from biasrank.poly import (
    Polynomial,
    degree,
    derivative_degree,
    discrete_derivative,
    evaluate_points,
    from_homogeneous_vector,
    homogeneous_part,
    homogeneous_vector,
    interpolate_from_table,
    iterated_derivative,
    pull_back,
    restrict,
    shift,
    to_table,
)

seeds = st.integers(0, 2**40)


def rpoly(seed, p=5, n=3, d=4):
    return random_poly(SplitMix64(seed), p, n, d)


def test_parse_and_print():
    f = Polynomial.parse("3*x1^2*x2 + x2 - 7", 5, 2)
    assert f.coefficient((2, 1)) == 3
    assert f.coefficient((0, 0)) == 3
    assert Polynomial.parse(str(f), 5, 2) == f


def test_exponents_reduce_with_fermat():
    assert Polynomial.parse("x1^5", 5, 1) == Polynomial.parse("x1", 5, 1)


def test_parse_rejects_unknown_variable():
    with pytest.raises(UsageError):
        Polynomial.parse("x3", 5, 2)


@given(seeds)
def test_symbolic_evaluation_matches_table(seed):
    f = rpoly(seed)
    table = to_table(f).values
    rng = SplitMix64(seed + 1)
    for _ in range(10):
        x = rng.vector(5, 3)
        assert f(x) == table[x[0] * 25 + x[1] * 5 + x[2]]


@given(seeds, seeds)
def test_product_table_is_pointwise_product(s1, s2):
    f, g = rpoly(s1, d=2), rpoly(s2, d=2)
    np.testing.assert_array_equal(to_table(f * g).values, to_table(f).values * to_table(g).values % 5)


@given(seeds, st.data())
def test_derivatives_commute(seed, data):
    f = rpoly(seed)
    h1 = data.draw(st.tuples(*[st.integers(0, 4)] * 3))
    h2 = data.draw(st.tuples(*[st.integers(0, 4)] * 3))
    assert discrete_derivative(discrete_derivative(f, h1), h2) == discrete_derivative(discrete_derivative(f, h2), h1)


def test_mixed_derivative_of_monomial():
    f = Polynomial.parse("x1*x2*x3*x4", 5, 4)
    units = [tuple(int(i == j) for j in range(4)) for i in range(4)]
    assert iterated_derivative(f, units) == Polynomial.constant(5, 4, 1)


@given(seeds)
def test_four_derivatives_of_a_quartic_are_constant(seed):
    f = rpoly(seed)
    rng = SplitMix64(seed)
    hs = [rng.vector(5, 3) for _ in range(4)]
    assert degree(iterated_derivative(f, hs)) <= 0


@given(seeds)
def test_derivative_degree_equals_symbolic_degree(seed):
    rng = SplitMix64(seed)
    n = 1 + rng.below(3)
    f = random_poly(rng, 5, n, rng.below(5))
    assert derivative_degree(f) == degree(f)


@given(st.integers(0, 4))
def test_diagonal_fourth_derivative(x):
    f = Polynomial.parse("x1^4", 5, 1)
    for base in range(5):
        assert iterated_derivative(f, [(x,)] * 4)((base,)) == 24 * x**4 % 5


@given(seeds)
def test_shift(seed):
    f = rpoly(seed)
    h = SplitMix64(seed).vector(5, 3)
    pts = all_points(5, 3)
    np.testing.assert_array_equal(evaluate_points(shift(f, h), pts), evaluate_points(f, (pts + np.array(h)) % 5))


@given(seeds)
def test_restrict_is_composition_with_the_parametrization(seed):
    rng = SplitMix64(seed)
    f = random_poly(rng, 5, 3, 3)
    S = random_subspace(rng, 5, 3, 1)
    g = restrict(f, S)
    for c in all_points(5, S.dim):
        assert g(c) == f(S.point(c))


@given(seeds)
def test_pull_back_inverts_restrict_on_the_subspace(seed):
    rng = SplitMix64(seed)
    S = random_subspace(rng, 5, 3, 1)
    g = random_poly(rng, 5, S.dim, 2)
    f = pull_back(g, S)
    for x in points_array(S):
        assert f(x) == g(S.coordinates(x))


@given(seeds)
def test_table_round_trip(seed):
    f = rpoly(seed)
    assert interpolate_from_table(to_table(f)) == f


def test_homogeneous_vector_round_trip():
    f = Polynomial.parse("x1^2 + 3*x1*x2 + 2*x2^2 + x1", 5, 2)
    q = homogeneous_part(f, 2)
    assert from_homogeneous_vector(5, 2, 2, homogeneous_vector(f, 2)) == q
    assert degree(Polynomial.zero(5, 2)) == -1
