import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biasrank.gfcore import (
    AffineSubspace,
    BudgetError,
    LinearForm,
    Subspace,
    UsageError,
    all_points,
    check_budget,
    forms_kernel,
    index_point,
    indices_of,
    intersect_subspaces,
    inv,
    is_square,
    mat_inverse,
    mat_mul,
    nullspace,
    point_index,
    points_array,
    projective_points,
    rank,
    rref,
    solve_matrix,
    sqrt_mod,
    subspaces_of_dim,
    sum_subspaces,
)
from biasrank.harness.generators import SplitMix64, random_subspace

primes = st.sampled_from([3, 5, 7])


def matrices(p, rows, cols):
    return st.lists(st.lists(st.integers(0, p - 1), min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@given(primes, st.integers(1, 30))
def test_inverse(p, a):
    if a % p:
        assert a * inv(a, p) % p == 1


def test_inverse_of_zero_is_an_error():
    with pytest.raises(ZeroDivisionError):
        inv(0, 5)


def test_squares_mod_5():
    assert [x for x in range(5) if is_square(x, 5)] == [1, 4]
    for a in (1, 4):
        r = sqrt_mod(a, 5)
        assert r * r % 5 == a
    assert sqrt_mod(2, 5) is None


def test_point_order_is_row_major():
    pts = all_points(3, 2)
    assert pts[:4].tolist() == [[0, 0], [0, 1], [0, 2], [1, 0]]
    assert point_index((1, 2), 3) == 5
    assert index_point(5, 3, 2) == (1, 2)
    np.testing.assert_array_equal(indices_of(pts, 3), np.arange(9))


@given(st.data())
def test_rref_is_idempotent_and_keeps_rank(data):
    p = data.draw(primes)
    m = data.draw(matrices(p, data.draw(st.integers(1, 4)), 4))
    r1 = rref(m, p)[0]
    assert rref(r1, p)[0] == r1
    assert rank(m, p) == len(r1)


@given(st.data())
def test_nullspace_vectors_solve_the_system(data):
    p = data.draw(primes)
    m = data.draw(matrices(p, 3, 4))
    ns = nullspace(m, p, 4)
    assert len(ns) == 4 - rank(m, p)
    for v in ns:
        assert all(sum(a * b for a, b in zip(row, v)) % p == 0 for row in m)


@given(st.data())
def test_solve_matrix_particular_plus_kernel(data):
    p = data.draw(primes)
    m = data.draw(matrices(p, 3, 3))
    x = data.draw(st.lists(st.integers(0, p - 1), min_size=3, max_size=3))
    rhs = [sum(a * b for a, b in zip(row, x)) % p for row in m]
    sol = solve_matrix(m, rhs, p, 3)
    assert sol is not None
    part, kernel = sol
    assert [sum(a * b for a, b in zip(row, part)) % p for row in m] == rhs
    assert len(kernel) == 3 - rank(m, p)


def test_inconsistent_system_has_no_solution():
    assert solve_matrix([[1, 1], [1, 1]], [0, 1], 5, 2) is None


def test_mat_inverse():
    a = [[1, 2], [3, 4]]
    assert mat_mul(a, mat_inverse(a, 5), 5) == [[1, 0], [0, 1]]


def test_subspace_canonical_form():
    s1 = Subspace.span(5, 3, [(1, 1, 0), (2, 2, 1)])
    s2 = Subspace.span(5, 3, [(0, 0, 3), (4, 4, 0)])
    assert s1 == s2
    assert s1.dim == 2 and s1.codim == 1
    assert s1.contains((3, 3, 4)) and not s1.contains((1, 0, 0))
    assert Subspace.from_json(5, s1.to_json()) == s1


def test_annihilator_and_kernel_are_dual():
    s = Subspace.span(5, 4, [(1, 2, 0, 0), (0, 0, 1, 3)])
    assert forms_kernel(5, 4, s.annihilator()) == s


def test_two_hyperplanes_meet_in_codim_2():
    rng = SplitMix64(11)
    a, b = random_subspace(rng, 5, 3, 1), random_subspace(rng, 5, 3, 1)
    meet = intersect_subspaces(a, b)
    pts = points_array(Subspace.full(5, 3))
    members = [tuple(x) for x in pts if a.contains(x) and b.contains(x)]
    assert len(members) == len(meet)
    assert meet.codim == (1 if a == b else 2)


@given(st.integers(0, 2**32))
def test_dimension_formula(seed):
    rng = SplitMix64(seed)
    a = random_subspace(rng, 3, 4, rng.below(5))
    b = random_subspace(rng, 3, 4, rng.below(5))
    assert intersect_subspaces(a, b).dim + sum_subspaces(a, b).dim == a.dim + b.dim


def test_affine_subspace_points():
    A = AffineSubspace((1, 2, 3), Subspace.span(5, 3, [(1, 0, 0)]))
    pts = points_array(A)
    assert len(pts) == 5
    assert all(A.contains(x) for x in pts)
    assert A.offset[0] == 0  # reduced at the pivot


def test_linear_form():
    f = LinearForm(5, (1, 2), 3)
    assert f((1, 1)) == 1
    assert f.scale(2)((1, 1)) == 2


def test_projective_points_count():
    assert len(projective_points(5, 3)) == (5**3 - 1) // 4
    assert len(list(subspaces_of_dim(3, 2, 1))) == 4


def test_budget():
    check_budget(10, 10)
    with pytest.raises(BudgetError):
        check_budget(11, 10)
    with pytest.raises(BudgetError):
        all_points(5, 10, budget=1000)
