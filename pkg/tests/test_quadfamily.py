from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biasrank.gfcore import AffineSubspace, Subspace, UsageError, all_points, forms_kernel
from biasrank.harness.generators import SplitMix64, random_quadratic_form, random_subset, random_subspace
from biasrank.poly import Polynomial
from biasrank.quadfamily import (
    QuadFamily,
    admissible,
    admissible_density,
    affine_counting_check,
    codim_one_affine_subspaces,
    cubicity_defect,
    quartic_form_tensor,
    quartic_form_value,
    regularity,
    regularize,
    shifted,
    zero_set,
)
from biasrank.quadform import gram_pair, schmidt_rank_value
from biasrank.sumset import GroupSubset

seeds = st.integers(0, 2**40)
HYP = QuadFamily.of(["x1*x2 + x3*x4"], 5, 4)


def test_regularity_of_a_rank_two_form():
    reg = regularity(HYP)
    assert reg.value == 2
    assert not reg.sentinel


def test_regularity_witness_for_a_dependent_pair():
    fam = QuadFamily.of(["x1*x2 + x3*x4", "x1*x2 + x3*x4"], 5, 4)
    reg = regularity(fam)
    assert reg.value == 0
    assert reg.witness == (1, 4)


def test_empty_family_sentinel():
    reg = regularity(QuadFamily.of([], 5, 3))
    assert reg.sentinel and reg.value == 5**3 + 1


def test_regularize_drops_the_low_rank_member():
    fam = QuadFamily.of(["x1*x2", "x1*x2 + x3*x4 + x5*x6"], 5, 6)
    fam2, V = regularize(fam, 2)
    assert fam2.N == 1
    assert 1 <= V.codim <= 2
    assert regularity(fam2).value >= 2


@given(seeds)
def test_regularize_output_is_regular(seed):
    rng = SplitMix64(seed)
    fam = QuadFamily(tuple(random_quadratic_form(rng, 5, 4) for _ in range(2)), Subspace.full(5, 4))
    res = regularize(fam, 2)
    assert res.regularity.value >= 2
    assert res.family.N <= 2
    assert res.subspace.codim <= len(res.steps)  # each step cuts by fewer than R forms


def test_zero_set_size():
    X = zero_set(HYP)
    assert len(X) == 145 == 5**3 + 5**2 - 5
    assert X.contains((1, 0, 0, 3))
    assert not X.contains((1, 1, 0, 0))


def test_shifted_zero_set():
    X = zero_set(HYP)
    Xt = shifted(X, (1, 0, 0, 0))
    assert len(Xt) == 45
    assert all(X.contains(tuple((a + b) % 5 for a, b in zip(x, (1, 0, 0, 0)))) for x in Xt.points())


@given(seeds)
def test_pairing_on_shifted_zero_sets(seed):
    rng = SplitMix64(seed)
    Q = random_quadratic_form(rng, 5, 3)
    fam = QuadFamily((Q,), Subspace.full(5, 3))
    t = rng.vector(5, 3)
    q = fam.quads[0]
    for x in shifted(zero_set(fam), t).points():
        assert gram_pair(q, t, x) == -q(t) % 5


def test_affine_counting_examples():
    A = AffineSubspace((0, 0, 0, 0), forms_kernel(5, 4, [(1, 0, 0, 0)]))
    r = affine_counting_check(A, HYP)
    assert (r.in_both, r.in_affine) == (45, 125)
    assert r.deviation == Fraction(4, 125)
    assert r.holds
    whole = affine_counting_check(AffineSubspace((0, 0, 0, 0), Subspace.full(5, 4)), HYP)
    assert whole.deviation == Fraction(145, 625) - Fraction(1, 5)


def test_affine_hyperplanes_are_all_distinct():
    hs = list(codim_one_affine_subspaces(Subspace.full(5, 3)))
    assert len(hs) == 155
    assert len({frozenset(map(tuple, all_points(5, 3)[[A.contains(x) for x in all_points(5, 3)]].tolist())) for A in hs}) == 155


def test_admissible_examples():
    fam = QuadFamily.of(["x1*x2"], 5, 3)
    assert admissible([(1, 0, 0), (1, 0, 0)], fam)
    assert not admissible([(1, 0, 0), (0, 1, 0)], fam)
    assert admissible([(0, 0, 1), (0, 1, 0), (1, 0, 0)], QuadFamily.of([], 5, 3))


def test_admissible_density_exact_value():
    fam = QuadFamily.of(["x1*x2"], 5, 3)
    res = admissible_density(GroupSubset.full(5, 3), Subspace.full(5, 3), fam)
    assert res.density == Fraction(1697, 390625)
    assert res.bound == Fraction(1, 5**6)
    assert res.holds


def test_admissible_density_by_brute_force():
    fam = QuadFamily.of(["x1*x2 + x2^2"], 3, 2)
    E = GroupSubset.from_points(3, 2, [(0, 1), (2, 2), (1, 0)])
    W = Subspace.full(3, 2)
    pts = [tuple(x) for x in all_points(3, 2)]
    count = sum(admissible([t, a, b, c], fam) for t in E.point_array.tolist() for a, b, c in product(pts, repeat=3))
    assert admissible_density(E, W, fam).admissible_count == count


def test_parallelepipeds_in_the_zero_set_are_admissible():
    fam = QuadFamily.of(["x1*x2 + x3^2"], 3, 3)
    X = zero_set(fam)
    pts = all_points(3, 3)
    for x in X.point_array:
        for h1, h2 in product(pts, repeat=2):
            corners = [x, x + h1, x + h2, x + h1 + h2]
            if all(X.contains(tuple(int(v) % 3 for v in c)) for c in corners):
                assert admissible([h1, h2], fam)


def test_quartic_tensor_of_a_monomial():
    D = quartic_form_tensor(Polynomial.parse("x1*x2*x3*x4", 5, 4))
    assert D[0, 1, 2, 3] == 1 and D[3, 2, 1, 0] == 1
    assert D[0, 0, 1, 2] == 0
    assert quartic_form_value(D, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)], 5) == 1


def test_cubicity_defect_of_x_to_the_fourth():
    res = cubicity_defect(Polynomial.parse("x1^4", 5, 1), GroupSubset.full(5, 1), Subspace.full(5, 1), QuadFamily.of([], 5, 1))
    assert res.defect == Fraction(4, 5) ** 4
    assert res.exhaustive


def test_cubicity_defect_vanishes_below_degree_four():
    f = Polynomial.parse("x1^3 + x1*x2*x3", 5, 3)
    res = cubicity_defect(f, GroupSubset.full(5, 3), Subspace.full(5, 3), QuadFamily.of(["x1*x2"], 5, 3))
    assert res.defect == 0


def test_cubicity_defect_sampling_is_seeded():
    f = Polynomial.parse("x1^4 + x2^2*x3^2", 5, 3)
    fam = QuadFamily.of([], 5, 3)
    a = cubicity_defect(f, GroupSubset.full(5, 3), Subspace.full(5, 3), fam, budget=1000, samples=500, seed=3)
    b = cubicity_defect(f, GroupSubset.full(5, 3), Subspace.full(5, 3), fam, budget=1000, samples=500, seed=3)
    assert not a.exhaustive and a.defect == b.defect


def test_family_must_match_the_ambient():
    with pytest.raises(UsageError):
        QuadFamily((Polynomial.parse("x1^2", 5, 2),), Subspace.full(5, 3))
