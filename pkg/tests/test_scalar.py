from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import fractions, scalars
from oracles import fractions_between, sym, sym_sign
from urysohn_retractions.errors import EmptyIntervalError
from urysohn_retractions.scalar import (
    ONE,
    SQRT2,
    ZERO,
    Ordering,
    Scalar,
    is_rational,
    rational_in_interval,
    scalar_compare,
)


def test_compare_examples() -> None:
    assert scalar_compare(ZERO, ZERO) is Ordering.EQUAL
    # sqrt 2 < 3/2 since 2 < 9/4
    assert scalar_compare(1 + SQRT2, Fraction(5, 2)) is Ordering.LESS
    # 3 - 2 sqrt 2 > 0 since 9 > 8
    assert scalar_compare(3 - 2 * SQRT2, 0) is Ordering.GREATER


def test_is_rational_examples() -> None:
    assert is_rational(Fraction(7, 3))
    assert not is_rational(SQRT2)
    assert is_rational(Scalar(Fraction(1, 2), 0))
    assert Scalar(Fraction(1, 2), 0) == Fraction(1, 2)


def test_canonical_form() -> None:
    s = Scalar(Fraction(2, 4), Fraction(-3, 6))
    assert s.rat == Fraction(1, 2) and s.irr == Fraction(-1, 2)
    assert hash(Scalar(3)) == hash(Fraction(3))
    assert SQRT2 * SQRT2 == 2


def test_rational_in_interval_examples() -> None:
    assert rational_in_interval(0, 1) == Fraction(1, 2)
    assert rational_in_interval(1, 2) == Fraction(3, 2)
    assert rational_in_interval(SQRT2, SQRT2 + Fraction(1, 80)) == Fraction(17, 12)


def test_rational_in_interval_brute_force_sqrt2() -> None:
    found = fractions_between(SQRT2, SQRT2 + Fraction(1, 80), 12)
    assert found[0] == Fraction(17, 12)
    assert all(f.denominator == 12 for f in found)


def test_empty_interval() -> None:
    with pytest.raises(EmptyIntervalError):
        rational_in_interval(1, 1)
    with pytest.raises(EmptyIntervalError):
        rational_in_interval(SQRT2, 1)


def test_division_and_inverse() -> None:
    x = 3 - 2 * SQRT2
    assert x * x.inverse() == ONE
    assert (1 / x) == 3 + 2 * SQRT2
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


def test_floor() -> None:
    assert SQRT2.floor() == 1
    assert (-SQRT2).floor() == -2
    assert Scalar(Fraction(7, 2)).floor() == 3
    assert (10 * SQRT2).floor() == 14


@given(scalars(), scalars())
def test_compare_matches_exact_oracle(a: Scalar, b: Scalar) -> None:
    expected = sym_sign(a - b)
    assert int(scalar_compare(a, b)) == expected
    assert (a < b) == (expected < 0)
    assert (a == b) == (expected == 0)


@given(scalars(), scalars())
def test_trichotomy(a: Scalar, b: Scalar) -> None:
    assert [a < b, a == b, a > b].count(True) == 1


@given(scalars(), scalars())
def test_compare_agrees_with_float_intervals(a: Scalar, b: Scalar) -> None:
    lo_a, hi_a = a.float_interval()
    lo_b, hi_b = b.float_interval()
    if hi_a < lo_b:
        assert a < b
    elif hi_b < lo_a:
        assert a > b


@given(scalars(), scalars(), scalars())
def test_field_axioms(a: Scalar, b: Scalar, c: Scalar) -> None:
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a and a * b == b * a
    assert a - a == ZERO
    if a:
        assert a * a.inverse() == ONE


@given(scalars(), scalars())
def test_arithmetic_matches_sympy(a: Scalar, b: Scalar) -> None:
    assert sym(a + b).equals(sym(a) + sym(b))
    assert sym(a * b).equals(sym(a) * sym(b))


@given(scalars(8, 6), fractions(6, 6, signed=False))
def test_rational_in_interval_is_minimal(lo: Scalar, width: Fraction) -> None:
    assume(width > 0)
    hi = lo + width
    q = rational_in_interval(lo, hi)
    assert lo < q < hi
    smaller = [f for f in fractions_between(lo, hi, q.denominator) if f.denominator < q.denominator]
    assert smaller == []
    same = [f for f in fractions_between(lo, hi, q.denominator) if f.denominator == q.denominator]
    assert same[0] == q


@given(st.integers(-20, 20), st.integers(1, 9), st.integers(1, 9))
def test_rational_in_interval_rational_bounds(n: int, k: int, den: int) -> None:
    lo = Fraction(n, den)
    hi = lo + Fraction(k, den * 3)
    q = rational_in_interval(lo, hi)
    assert lo < q < hi
    assert not any(lo < Fraction(p, d) < hi for d in range(1, q.denominator) for p in range(-200, 200))
