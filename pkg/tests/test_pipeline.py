import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biasrank.gfcore import Subspace, UsageError, forms_kernel, rank
from biasrank.harness.checks import implication_check
from biasrank.harness.generators import SplitMix64, structured_quartic
from biasrank.harness.pipeline import compress_family, derivative_extract, pipeline, present_cubic
from biasrank.poly import Polynomial, homogeneous_vector
from biasrank.quadfamily import QuadFamily


def P(text, n, p=5):
    return Polynomial.parse(text, p, n)


def test_presentation_of_a_product():
    pr = present_cubic(P("x1*x2^2 + x3^3", 3), cap=3)
    assert pr.s == 2


def test_x1_fourth():
    rep = pipeline(P("x1^4", 2))
    assert rep.passed
    assert [str(q) for q in rep.family.polys()] == ["x1^2"]


def test_no_quartic_part():
    rep = pipeline(P("x1^3 + x2*x3", 3))
    assert rep.passed and rep.stats["N"] == 0 and rep.subspace == Subspace.full(5, 3)


def test_pool_contains_the_factors_of_a_product():
    f = P("x1*x2", 4) * P("x3^2 + x4^2 + x1*x3", 4)
    ext = derivative_extract(f)
    pools = [ext.pool] + ext.alternatives
    vecs = [homogeneous_vector(P(t, 4), 2) for t in ("x1*x2", "x3^2 + x4^2 + x1*x3")]
    assert any(
        all(rank([homogeneous_vector(q, 2) for q in pool] + [v], 5) == len(pool) for v in vecs) for pool in pools
    )


def test_structured_seed_7():
    sq = structured_quartic(SplitMix64(7), 5, 4, 1)
    rep = pipeline(sq.poly, R=1)
    assert rep.passed and rep.stats["N"] <= 2 and rep.stats["codim"] == 0


def test_pipeline_on_a_subspace():
    V = forms_kernel(5, 3, [(0, 0, 1)])
    rep = pipeline(P("x1^2*x2^2 + x3^4", 3), V=V)
    assert rep.passed
    assert rep.subspace.is_subspace_of(V)


def test_compress_finds_a_single_member():
    f = P("x1^2", 3) * P("x2^2 + x3^2", 3)
    quads = [P("x1^2", 3), P("x2^2 + x3^2", 3), P("x1*x2", 3)]
    small = compress_family(f, quads, Subspace.full(5, 3))
    assert len(small) == 1
    assert implication_check(f, QuadFamily.of(small, 5, 3)).passed


@settings(max_examples=6)
@given(st.integers(0, 2**40))
def test_pass_is_sound(seed):
    sq = structured_quartic(SplitMix64(seed), 5, 3, 1)
    rep = pipeline(sq.poly, R=1, seed=seed % 7)
    if rep.passed:
        assert implication_check(sq.poly, QuadFamily(rep.family.quads, rep.subspace), rep.subspace).passed


def test_quartic_tools_refuse_p3():
    f = P("x1^2*x2^2", 2, p=3)
    with pytest.raises(UsageError):
        pipeline(f)
    with pytest.raises(UsageError):
        implication_check(f, QuadFamily.of([], 3, 2))
