import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from biasrank.charsum import (
    CyclotomicInteger,
    bias,
    bias_equals_power_check,
    level_counts,
    power_check_counts,
    squared_modulus,
)
from biasrank.gfcore import Subspace, UsageError
from biasrank.harness.generators import SplitMix64, random_poly
from biasrank.poly import Polynomial


def test_square_on_f5():
    f = Polynomial.parse("x1^2", 5, 1)
    assert level_counts(f).counts == (1, 2, 0, 0, 2)
    assert bias(f) == pytest.approx(5**-0.5, abs=1e-12)
    assert squared_modulus(level_counts(f)) == 5
    assert bias_equals_power_check(f, 1)
    assert not bias_equals_power_check(f, 2)


def test_hyperbolic_plane_on_f5():
    f = Polynomial.parse("x1*x2", 5, 2)
    # nine zeros: x1 = 0 or x2 = 0
    assert level_counts(f).counts == (9, 4, 4, 4, 4)
    assert squared_modulus(level_counts(f)) == 25
    assert bias_equals_power_check(f, 2)
    assert bias(f) == pytest.approx(0.2)


def test_constants_and_linear_forms():
    assert bias(Polynomial.constant(5, 2, 3)) == pytest.approx(1.0)
    assert squared_modulus(level_counts(Polynomial.parse("x1 + 2*x2", 5, 2))) == 0


def test_bias_on_a_subspace():
    f = Polynomial.parse("x1*x2", 5, 2)
    V = Subspace.span(5, 2, [(1, 0)])
    assert bias(f, V) == pytest.approx(1.0)


def test_power_check_needs_a_quadratic():
    with pytest.raises(UsageError):
        bias_equals_power_check(Polynomial.parse("x1^3", 5, 1), 1)


@given(st.integers(0, 2**40), st.sampled_from([3, 5, 7]))
def test_exact_modulus_matches_float_bias(seed, p):
    f = random_poly(SplitMix64(seed), p, 2, 2)
    c = level_counts(f)
    assert squared_modulus(c).to_complex().real == pytest.approx((bias(f) * c.domain_size) ** 2, abs=1e-6)


@given(st.lists(st.integers(-5, 5), min_size=5, max_size=5), st.lists(st.integers(-5, 5), min_size=5, max_size=5))
def test_cyclotomic_arithmetic_matches_complex(a, b):
    x, y = CyclotomicInteger(5, a), CyclotomicInteger(5, b)
    z = complex(math.cos(2 * math.pi / 5), math.sin(2 * math.pi / 5))
    val = lambda c: sum(k * z**j for j, k in enumerate(c))  # noqa: E731
    assert (x * y).to_complex() == pytest.approx(val(a) * val(b), abs=1e-9)
    assert (x + y).to_complex() == pytest.approx(val(a) + val(b), abs=1e-9)
    assert x.conjugate().to_complex() == pytest.approx(val(a).conjugate(), abs=1e-9)


def test_relation_sum_of_roots_is_zero():
    assert CyclotomicInteger(5, [1, 1, 1, 1, 1]) == 0
    assert power_check_counts(level_counts(Polynomial.parse("x1^2 + x2^2", 5, 2)), 2)
