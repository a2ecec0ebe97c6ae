from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from signrank.errors import FieldMismatch, ParseError
from signrank.scalars import (
    DivisionByZero,
    FieldTag,
    Q,
    Scalar,
    Sign,
    floor_scaled,
    format_scalar,
    parse_field,
    parse_scalar,
    sign,
)

R2 = FieldTag(2)
R5 = FieldTag(5)

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=60)
fields = st.sampled_from([FieldTag(d) for d in (2, 3, 5, 7, 11, 13)])


@st.composite
def elements(draw, field=None):
    K = field or draw(fields)
    return Scalar(K, draw(fractions), draw(fractions))


def oracle(x: Scalar) -> mpmath.mpf:
    with mpmath.workprec(200):
        a = mpmath.mpf(x.a.numerator) / x.a.denominator
        b = mpmath.mpf(x.b.numerator) / x.b.denominator
        d = x.field.d or 0
        return a + b * mpmath.sqrt(d)


def test_difference_of_squares():
    assert R2(1, 1) * R2(1, -1) == R2(-1, 0)


def test_inverse_of_sqrt5():
    assert R5(0, 1).inv() == R5(0, Fraction(1, 5))


def test_rational_sum():
    assert Scalar(Q, Fraction(2, 3)) + Fraction(1, 6) == Scalar(Q, Fraction(5, 6))


@pytest.mark.parametrize(
    "x, expected",
    [
        (R2(3, -2), Sign.PLUS),
        (R2(1, -1), Sign.MINUS),
        (R2(Fraction(-7, 5), 1), Sign.PLUS),
        (R5(0, 0), Sign.ZERO),
        (Scalar(Q, Fraction(-1, 9)), Sign.MINUS),
    ],
)
def test_sign_examples(x, expected):
    assert sign(x) is expected


def test_sign_near_cancellation():
    # 99/70 is a convergent of sqrt 2 from above, 577/408 likewise
    assert sign(R2(Fraction(99, 70), -1)) is Sign.PLUS
    assert sign(R2(Fraction(-577, 408), 1)) is Sign.MINUS


@pytest.mark.parametrize(
    "x, N, k",
    [
        (R2(0, 1), 10, 14),
        (Scalar(Q, Fraction(-1, 3)), 3, -1),
        (R5(Fraction(1, 2), Fraction(1, 2)), 100, 161),
        (R2(0, -1), 10, -15),
        (Scalar(Q, 2), 5, 10),
    ],
)
def test_floor_scaled_examples(x, N, k):
    assert floor_scaled(x, N) == k


def test_parse_examples():
    assert parse_scalar("3/4", Q) == Scalar(Q, Fraction(3, 4))
    assert parse_scalar(["−1/2", "2/3"], R5) == R5(Fraction(-1, 2), Fraction(2, 3))
    with pytest.raises(ParseError):
        parse_scalar("1/0", Q)
    with pytest.raises(ParseError):
        parse_scalar("abc", Q)


def test_field_tags():
    assert str(Q) == "Q"
    assert parse_field(str(R5)) == R5
    with pytest.raises(ValueError):
        FieldTag(8)
    with pytest.raises(FieldMismatch):
        R2(1) + R5(1)


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        R2(1, 1) / R2(0)
    with pytest.raises(ZeroDivisionError):
        Scalar(Q, 0).inv()


@settings(max_examples=300, deadline=None)
@given(elements())
def test_sign_matches_high_precision(x):
    v = oracle(x)
    assert int(sign(x)) == (v > 0) - (v < 0)


@settings(max_examples=300, deadline=None)
@given(elements(), st.integers(min_value=1, max_value=10**6))
def test_floor_scaled_brackets(x, N):
    k = floor_scaled(x, N)
    assert sign(x * N - k) >= 0
    assert sign(x * N - (k + 1)) < 0


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_field_axioms(data):
    K = data.draw(fields)
    x, y, z = (data.draw(elements(K)) for _ in range(3))
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == K.zero()
    if x:
        assert x * x.inv() == K.one()


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_order_is_compatible(data):
    K = data.draw(fields)
    x, y, z = (data.draw(elements(K)) for _ in range(3))
    if x < y:
        assert x + z < y + z
    assert sign(x * y) == sign(x) * sign(y)
    assert sign(-x) == -sign(x)


@settings(max_examples=200, deadline=None)
@given(elements())
def test_format_round_trip(x):
    assert parse_scalar(format_scalar(x), x.field) == x
