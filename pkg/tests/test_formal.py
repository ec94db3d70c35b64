from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starlab.formal import (
    DimensionError,
    NotInvertibleError,
    NuSeries,
    ParseError,
    Polynomial,
    format_series,
    parse_polynomial,
    poly_derive,
    poly_mul,
    polynomial_from_json,
    polynomial_to_json,
    series_from_json,
    series_invert,
    series_mul,
    series_to_json,
)


def P(text, dim=2):
    return parse_polynomial(text, dim)


def S(texts, dim=2):
    return NuSeries([P(t, dim) for t in texts], len(texts) - 1, dim)


coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=6)
polys2 = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coeffs, max_size=5).map(
    lambda d: sum((Polynomial.monomial(e, c) for e, c in d.items()), Polynomial.zero(2)))


def test_difference_of_squares():
    assert poly_mul(P("x1 + 1", 1), P("x1 - 1", 1)) == P("x1^2 - 1", 1)


def test_unit_and_monomial_product():
    p = P("3 x1 x2 - x2^2")
    assert poly_mul(p, Polynomial.constant(2)) == p
    assert poly_mul(P("x1 x2"), P("x1")) == P("x1^2 x2")


def test_derivatives():
    assert poly_derive(P("x1^2"), (1, 0)) == P("2 x1")
    assert poly_derive(P("x1^2 x2"), (2, 0)) == P("2 x2")
    assert poly_derive(P("x1"), (0, 1)).is_zero()


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        poly_mul(P("x1", 1), P("x1", 2))


def test_no_stored_zeros():
    p = P("x1 - x1 + x2")
    assert p.terms == {(0, 1): 1}


def test_canonical_order_is_graded_lex():
    assert str(P("1 + x2 + x1 + x1 x2 + x1^2")) == "x1^2 + x1 x2 + x1 + x2 + 1"


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as exc:
        parse_polynomial("x1 + * x2", 2)
    assert exc.value.position is not None
    with pytest.raises(ParseError):
        parse_polynomial("x3", 2)


def test_series_mul_examples():
    a = S(["1", "x1", "0"])
    b = S(["1", "-x1", "0"])
    assert series_mul(a, b) == S(["1", "0", "-x1^2"])
    assert series_mul(a, S(["1", "0", "0"])) == a
    assert series_mul(S(["0", "x1"]), S(["0", "x2"])).is_zero()


def test_series_invert_examples():
    assert series_invert(S(["1", "1", "0"])) == S(["1", "-1", "1"])
    assert series_invert(S(["2"])) == S(["1/2"])
    assert series_invert(S(["1", "x1"])) == S(["1", "-x1"])
    with pytest.raises(NotInvertibleError):
        series_invert(S(["x1", "1"]))


def test_series_truncation_mismatch():
    with pytest.raises(ValueError):
        series_mul(S(["1", "0"]), S(["1", "0", "0"]))


def test_format_series_nu_ascending():
    assert format_series(S(["x1 x2", "1/2", "0"])) == "x1 x2 + 1/2 ν"


def test_json_round_trip():
    p = P("x1^2 x2 - 1/3 x1 + 7")
    assert polynomial_from_json(polynomial_to_json(p), 2) == p
    s = S(["x1", "1/2", "x2^2"])
    assert series_from_json(series_to_json(s)) == s
    assert polynomial_to_json(P("1/2 x1"))[0] == {"exponents": [1, 0], "coeff": "1/2"}


@settings(max_examples=60, deadline=None)
@given(polys2, polys2, polys2)
def test_ring_axioms(a, b, c):
    assert poly_mul(poly_mul(a, b), c) == poly_mul(a, poly_mul(b, c))
    assert poly_mul(a, b + c) == poly_mul(a, b) + poly_mul(a, c)
    assert poly_mul(a, b) == poly_mul(b, a)


@settings(max_examples=40, deadline=None)
@given(st.lists(polys2, min_size=4, max_size=4), coeffs.filter(lambda c: c != 0))
def test_inverse_property(parts, lead):
    a = NuSeries([Polynomial.constant(2, lead)] + parts[1:], 3, 2)
    one = series_mul(a, series_invert(a))
    assert one == NuSeries.constant(2, 3)


@settings(max_examples=40, deadline=None)
@given(st.lists(polys2, min_size=4, max_size=4), st.lists(polys2, min_size=4, max_size=4))
def test_truncation_coherence(xs, ys):
    a, b = NuSeries(xs, 3, 2), NuSeries(ys, 3, 2)
    assert series_mul(a, b).truncate(1) == series_mul(a.truncate(1), b.truncate(1))


def test_fraction_coefficients_are_reduced():
    p = P("2/4 x1")
    (c,) = p.terms.values()
    assert c == Fraction(1, 2) and c.denominator == 2
