"""Exact arithmetic in the real quadratic field Q(sqrt 2).

Every metric value in the package is a :class:`Scalar` ``rat + irr*sqrt(2)``
with rational parts. Order is decided exactly by integer squaring, so
triangle inequalities and strict neighbourhood tests never need a tolerance.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Union

from .errors import EmptyIntervalError

Rational = Fraction

ScalarLike = Union["Scalar", Fraction, int]


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _sign_of(x: Fraction, y: Fraction) -> int:
    """Sign of x + y*sqrt(2)."""
    if y == 0:
        return (x > 0) - (x < 0)
    if x == 0:
        return (y > 0) - (y < 0)
    if (x > 0) == (y > 0):
        return 1 if x > 0 else -1
    # opposite signs: compare x^2 with 2 y^2 (never equal, sqrt 2 is irrational)
    if x * x > 2 * y * y:
        return 1 if x > 0 else -1
    return 1 if y > 0 else -1


class Scalar:
    """An element ``rat + irr*sqrt(2)`` of Q(sqrt 2).

    Instances are immutable and canonical: ``Scalar(3) == Fraction(3)`` and the
    hash agrees with ``Fraction`` whenever the value is rational.
    """

    __slots__ = ("rat", "irr", "_hash")

    def __init__(self, rat: ScalarLike = 0, irr: int | Fraction = 0) -> None:
        if isinstance(rat, Scalar):
            if irr:
                raise TypeError("irr must be omitted when copying a Scalar")
            self.rat = rat.rat
            self.irr = rat.irr
        else:
            self.rat = rat if type(rat) is Fraction else Fraction(rat)
            self.irr = irr if type(irr) is Fraction else Fraction(irr)
        self._hash = None

    # construction helpers -------------------------------------------------

    @classmethod
    def _raw(cls, rat: Fraction, irr: Fraction) -> "Scalar":
        obj = cls.__new__(cls)
        obj.rat = rat
        obj.irr = irr
        obj._hash = None
        return obj

    @classmethod
    def coerce(cls, value: ScalarLike) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (int, Fraction)):
            return cls._raw(Fraction(value), _ZERO_Q)
        if isinstance(value, _RationalABC):
            return cls._raw(Fraction(value.numerator, value.denominator), _ZERO_Q)
        if isinstance(value, str):
            return cls._raw(Fraction(value), _ZERO_Q)
        raise TypeError(f"cannot interpret {value!r} as a Scalar")

    # predicates -----------------------------------------------------------

    def is_rational(self) -> bool:
        return self.irr == 0

    def as_fraction(self) -> Fraction:
        if self.irr:
            raise ValueError(f"{self} is irrational")
        return self.rat

    def sign(self) -> int:
        return _sign_of(self.rat, self.irr)

    def __bool__(self) -> bool:
        return bool(self.rat) or bool(self.irr)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if type(other) is not Scalar:
            if isinstance(other, (int, Fraction)):
                return Scalar._raw(self.rat + other, self.irr)
            return NotImplemented
        if not self.irr and not other.irr:
            return Scalar._raw(self.rat + other.rat, _ZERO_Q)
        return Scalar._raw(self.rat + other.rat, self.irr + other.irr)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(-self.rat, -self.irr)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __sub__(self, other):
        if type(other) is not Scalar:
            if isinstance(other, (int, Fraction)):
                return Scalar._raw(self.rat - other, self.irr)
            return NotImplemented
        if not self.irr and not other.irr:
            return Scalar._raw(self.rat - other.rat, _ZERO_Q)
        return Scalar._raw(self.rat - other.rat, self.irr - other.irr)

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return Scalar._raw(other - self.rat, -self.irr)
        return NotImplemented

    def __mul__(self, other):
        if type(other) is not Scalar:
            if isinstance(other, (int, Fraction)):
                return Scalar._raw(self.rat * other, self.irr * other)
            return NotImplemented
        a, b, c, d = self.rat, self.irr, other.rat, other.irr
        return Scalar._raw(a * c + 2 * b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        a, b = self.rat, self.irr
        norm = a * a - 2 * b * b
        if norm == 0:
            raise ZeroDivisionError("Scalar division by zero")
        return Scalar._raw(a / norm, -b / norm)

    def __truediv__(self, other):
        if type(other) is not Scalar:
            if isinstance(other, (int, Fraction)):
                if other == 0:
                    raise ZeroDivisionError("Scalar division by zero")
                return Scalar._raw(self.rat / other, self.irr / other)
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    # order ------------------------------------------------------------------

    def _cmp(self, other) -> int:
        if type(other) is not Scalar:
            if isinstance(other, (int, Fraction)):
                if not self.irr:
                    return (self.rat > other) - (self.rat < other)
                return _sign_of(self.rat - other, self.irr)
            return NotImplemented  # type: ignore[return-value]
        if not self.irr and not other.irr:
            return (self.rat > other.rat) - (self.rat < other.rat)
        return _sign_of(self.rat - other.rat, self.irr - other.irr)

    def __eq__(self, other):
        if type(other) is Scalar:
            return self.rat == other.rat and self.irr == other.irr
        if isinstance(other, (int, Fraction)):
            return not self.irr and self.rat == other
        return NotImplemented

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __lt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rat) if not self.irr else hash((self.rat, self.irr))
        return self._hash

    def floor(self) -> int:
        """Largest integer not exceeding the value, computed exactly."""
        if not self.irr:
            return math.floor(self.rat)
        den = self.rat.denominator * self.irr.denominator // math.gcd(
            self.rat.denominator, self.irr.denominator
        )
        a = self.rat.numerator * (den // self.rat.denominator)
        b = self.irr.numerator * (den // self.irr.denominator)
        root = math.isqrt(2 * b * b)  # floor(|b| sqrt 2); never exact for b != 0
        s = root if b > 0 else -(root + 1)
        return (a + s) // den

    def __float__(self) -> float:
        return float(self.rat) + float(self.irr) * math.sqrt(2)

    def float_interval(self) -> tuple[float, float]:
        """A float interval guaranteed to contain the exact value."""
        v = float(self)
        slack = 4 * math.ulp(v) + 4 * (abs(float(self.rat)) + abs(float(self.irr))) * 2.0**-52
        return v - slack, v + slack

    # rendering ----------------------------------------------------------------

    def __repr__(self) -> str:
        if not self.irr:
            return f"Scalar({str(self.rat)!r})"
        return f"Scalar({str(self.rat)!r}, {str(self.irr)!r})"

    def __str__(self) -> str:
        if not self.irr:
            return str(self.rat)
        if not self.rat:
            return f"{self.irr}*√2"
        op = "+" if self.irr > 0 else "-"
        return f"{self.rat}{op}{abs(self.irr)}*√2"


_ZERO_Q = Fraction(0)
ZERO = Scalar._raw(_ZERO_Q, _ZERO_Q)
ONE = Scalar._raw(Fraction(1), _ZERO_Q)
SQRT2 = Scalar._raw(_ZERO_Q, Fraction(1))


def scalar_compare(a: ScalarLike, b: ScalarLike) -> Ordering:
    """Exact order of ``a`` and ``b`` as real numbers."""
    return Ordering(Scalar.coerce(a)._cmp(Scalar.coerce(b)))


def is_rational(a: ScalarLike) -> bool:
    return Scalar.coerce(a).is_rational()


def smin(values):
    """Minimum of an iterable of Scalars (exact)."""
    it = iter(values)
    best = next(it)
    for v in it:
        if v < best:
            best = v
    return best


def smax(values):
    it = iter(values)
    best = next(it)
    for v in it:
        if v > best:
            best = v
    return best


def _simplest_above(lo: Scalar, hi: Scalar | None) -> Fraction:
    # smallest-denominator rational in the open interval (lo, hi); hi=None is +inf
    fl = lo.floor()
    if hi is None or Scalar.coerce(fl + 1) < hi:
        return Fraction(fl + 1)
    # lo and hi share the integer part fl, so (lo, hi) sits inside [fl, fl+1]
    lo_frac = lo - fl
    hi_frac = hi - fl
    inner = _simplest_above(hi_frac.inverse(), None if not lo_frac else lo_frac.inverse())
    return fl + 1 / inner


def rational_in_interval(lo: ScalarLike, hi: ScalarLike) -> Fraction:
    """The rational in the open interval ``(lo, hi)`` with the least denominator.

    Ties on the denominator (only possible for integers) go to the smallest
    numerator. The search is the Stern-Brocot descent written with exact
    floors, so it terminates after a number of steps logarithmic in the
    answer's denominator.
    """
    lo_s, hi_s = Scalar.coerce(lo), Scalar.coerce(hi)
    if not lo_s < hi_s:
        raise EmptyIntervalError(f"empty interval ({lo_s}, {hi_s})")
    return _simplest_above(lo_s, hi_s)
