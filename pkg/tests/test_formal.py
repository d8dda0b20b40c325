from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from series.formal import LaurentSeries, PrecisionError

small_ints = st.integers(-5, 5)
scales = st.fractions(min_value=-3, max_value=3, max_denominator=4).filter(lambda x: x != 0)


@st.composite
def exact_series(draw):
    return LaurentSeries(draw(st.integers(-3, 3)), draw(st.lists(small_ints, max_size=5)))


@st.composite
def finite_series(draw):
    valuation = draw(st.integers(-2, 2))
    coeffs = draw(st.lists(small_ints, min_size=1, max_size=6))
    return LaurentSeries(valuation, coeffs, valuation + len(coeffs) + draw(st.integers(0, 2)))


def test_normalization_trims_leading_and_trailing_zeros():
    s = LaurentSeries(-2, [0, 0, 3, 0])
    assert s.valuation == 0
    assert s.terms() == {0: 3}
    assert s.is_exact


def test_zero_representations():
    exact = LaurentSeries.zero()
    assert exact.is_zero and exact.is_exact and exact.order is None
    finite = LaurentSeries(0, [0, 0], 4)
    assert finite.is_zero and not finite.is_exact
    assert finite.valuation == 3
    assert finite.order == 4


@given(exact_series(), exact_series(), exact_series())
def test_exact_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == LaurentSeries.zero()


@given(exact_series(), exact_series(), st.integers(-1, 6))
def test_product_of_truncations_agrees_with_truncated_product(a, b, precision):
    truncated = a.truncate(precision) * b.truncate(precision)
    assert truncated.agrees_with(a * b)


@given(finite_series(), finite_series())
def test_sum_precision_is_the_minimum(a, b):
    assert (a + b).precision == min(a.precision, b.precision)


@given(exact_series(), exact_series())
def test_leibniz_rule(a, b):
    assert (a * b).derivative() == a.derivative() * b + a * b.derivative()


@given(exact_series())
def test_euler_derivative_is_t_times_derivative(a):
    assert a.euler_derivative() == a.derivative().shift(1)


def test_derivative_loses_one_order_of_precision():
    s = LaurentSeries(0, [1, 2, 3], 3)
    assert s.derivative().precision == 2
    assert s.derivative().terms() == {0: 2, 1: 6}


@given(exact_series(), scales, scales)
def test_dilation_group_law(a, x, y):
    assert a.dilate(x).dilate(y) == a.dilate(x * y)


@given(exact_series(), exact_series(), scales)
def test_dilation_is_multiplicative(a, b, x):
    assert (a * b).dilate(x) == a.dilate(x) * b.dilate(x)


def test_dilation_by_zero_is_rejected():
    with pytest.raises(ValueError):
        LaurentSeries(0, [1, 1]).dilate(0)


@given(finite_series())
def test_inverse_of_finite_series(a):
    assume(not a.is_zero)
    product = a * a.invert()
    assert product.agrees_with(LaurentSeries.constant(1))
    assert product.precision == a.precision - a.valuation


def test_inverse_of_exact_monomial_is_exact():
    assert LaurentSeries.monomial(3, -2).invert() == LaurentSeries.monomial(Fraction(1, 3), 2)


def test_inverse_of_exact_polynomial_needs_precision():
    one_plus_t = LaurentSeries(0, [1, 1])
    with pytest.raises(PrecisionError):
        one_plus_t.invert()
    inverse = one_plus_t.invert(precision=5)
    assert inverse == LaurentSeries(0, [1, -1, 1, -1, 1], 5)
    assert (one_plus_t * inverse).agrees_with(1)


def test_zero_is_not_invertible():
    with pytest.raises(ZeroDivisionError):
        LaurentSeries(0, [0], 3).invert()


def test_division_by_scalar_and_series():
    s = LaurentSeries(-1, [2, 4])
    assert s / 2 == LaurentSeries(-1, [1, 2])
    assert (s / LaurentSeries.monomial(2, 1)) == LaurentSeries(-2, [1, 2])
    with pytest.raises(ZeroDivisionError):
        s / 0


def test_residue_coefficient():
    assert LaurentSeries(-2, [1, 7, 3]).residue_coefficient() == 7
    assert LaurentSeries.zero().residue_coefficient() == 0
    assert LaurentSeries(0, [1, 2]).residue_coefficient() == 0


def test_coefficient_beyond_precision_raises():
    s = LaurentSeries(-1, [1, 2, 3], 2)
    assert s.coefficient(1) == 3
    with pytest.raises(PrecisionError):
        s.coefficient(2)


def test_multiplying_by_a_pole_lowers_precision():
    s = LaurentSeries(0, [1, 1], 4)
    assert (s * LaurentSeries.monomial(1, -2)).precision == 2


def test_json_payloads():
    s = LaurentSeries(-1, [Fraction(1, 2), 0, 3], 4)
    assert s.to_json() == {"valuation": -1, "precision": 4, "coeffs": ["1/2", "0", "3", "0", "0"]}
    assert LaurentSeries.from_json(s.to_json()) == s
    with pytest.raises(ValueError):
        LaurentSeries.from_json({"valuation": 0})
    with pytest.raises(ValueError):
        LaurentSeries.from_json({"coeffs": ["x"]})
