"""Exact scalars over Q and real quadratic fields Q(sqrt d).

A :class:`Scalar` stores ``a + b*sqrt(d)`` with ``a, b`` as reduced
:class:`fractions.Fraction` values.  The square root is always the positive
real one, so every field carries a single ordering and :func:`sign` is
decidable with integer arithmetic alone.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Union

from .errors import FieldMismatch, ParseError, SignRankError

__all__ = [
    "DivisionByZero",
    "FieldTag",
    "Q",
    "Scalar",
    "Sign",
    "floor_scaled",
    "format_scalar",
    "parse_field",
    "parse_scalar",
    "sign",
]


class DivisionByZero(SignRankError, ZeroDivisionError):
    pass


def _is_squarefree(d: int) -> bool:
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class FieldTag:
    """Either the rationals (``d is None``) or Q(sqrt d) for squarefree d >= 2."""

    d: int | None = None

    def __post_init__(self):
        if self.d is None:
            return
        if not isinstance(self.d, int) or isinstance(self.d, bool):
            raise ValueError(f"d must be an integer, got {self.d!r}")
        if self.d < 2 or not _is_squarefree(self.d):
            raise ValueError(f"d must be a squarefree integer >= 2, got {self.d}")

    @property
    def is_rational(self) -> bool:
        return self.d is None

    @property
    def kind(self) -> str:
        return "Rationals" if self.d is None else "QuadExt"

    def __str__(self) -> str:
        return "Q" if self.d is None else f"Q(sqrt:{self.d})"

    def __call__(self, a=0, b=0) -> "Scalar":
        """Shorthand constructor: ``K(1, 2)`` is ``1 + 2*sqrt(d)`` in K."""
        return Scalar(self, a, b)

    def zero(self) -> "Scalar":
        return Scalar(self, 0, 0)

    def one(self) -> "Scalar":
        return Scalar(self, 1, 0)

    def sqrt(self) -> "Scalar":
        if self.d is None:
            raise FieldMismatch("Q has no adjoined square root")
        return Scalar(self, 0, 1)


Q = FieldTag()

_FIELD_RE = re.compile(r"Q\(sqrt:(\d+)\)\Z")


def parse_field(text: str) -> FieldTag:
    if text == "Q":
        return Q
    m = _FIELD_RE.match(text)
    if not m:
        raise ParseError(f"unknown field tag {text!r}", 0)
    try:
        return FieldTag(int(m.group(1)))
    except ValueError as exc:
        raise ParseError(str(exc), 0) from exc


class Sign(enum.IntEnum):
    MINUS = -1
    ZERO = 0
    PLUS = 1

    @property
    def char(self) -> str:
        return "-0+"[self + 1]

    @classmethod
    def from_char(cls, ch: str) -> "Sign":
        try:
            return _SIGN_CHARS[ch]
        except KeyError:
            raise ParseError(f"invalid sign character {ch!r}") from None

    def __mul__(self, other):
        if isinstance(other, Sign):
            return Sign(int(self) * int(other))
        return NotImplemented

    def __neg__(self):
        return Sign(-int(self))


_SIGN_CHARS = {"+": Sign.PLUS, "-": Sign.MINUS, "−": Sign.MINUS, "0": Sign.ZERO}


def _fsign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


Coercible = Union["Scalar", int, Fraction]


class Scalar:
    """Immutable element ``a + b*sqrt(d)`` of a :class:`FieldTag`."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field: FieldTag, a=0, b=0):
        a = Fraction(a)
        b = Fraction(b)
        if field.d is None and b:
            raise FieldMismatch("a rational scalar cannot carry a sqrt part")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def _raw(cls, field: FieldTag, a: Fraction, b: Fraction) -> "Scalar":
        obj = object.__new__(cls)
        object.__setattr__(obj, "field", field)
        object.__setattr__(obj, "a", a)
        object.__setattr__(obj, "b", b)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    def __reduce__(self):
        return (Scalar, (self.field, self.a, self.b))

    # -- coercion -------------------------------------------------------
    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatch(f"cannot combine {self.field} with {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar._raw(self.field, Fraction(other), Fraction(0))
        return NotImplemented

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Scalar._raw(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Scalar._raw(self.field, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return Scalar._raw(self.field, -self.a, -self.b)

    def __pos__(self):
        return self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not self.b and not o.b:
            return Scalar._raw(self.field, self.a * o.a, self.b)
        d = self.field.d
        return Scalar._raw(
            self.field,
            self.a * o.a + self.b * o.b * d,
            self.a * o.b + o.a * self.b,
        )

    __rmul__ = __mul__

    def inv(self) -> "Scalar":
        if not self.b:
            if not self.a:
                raise DivisionByZero("inverse of zero")
            return Scalar._raw(self.field, 1 / self.a, self.b)
        # (a + b r)^-1 = (a - b r) / (a^2 - d b^2); the norm is nonzero since d is not a square
        norm = self.a * self.a - self.field.d * self.b * self.b
        return Scalar._raw(self.field, self.a / norm, -self.b / norm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inv()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inv()

    # -- comparisons ----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return not self.b and self.a == other
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def sign(self) -> Sign:
        return sign(self)

    def __lt__(self, other):
        return sign(self - other) is Sign.MINUS

    def __le__(self, other):
        return sign(self - other) is not Sign.PLUS

    def __gt__(self, other):
        return sign(self - other) is Sign.PLUS

    def __ge__(self, other):
        return sign(self - other) is not Sign.MINUS

    def __abs__(self):
        return -self if sign(self) is Sign.MINUS else self

    # -- misc -----------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return not self.b

    def to_field(self, field: FieldTag) -> "Scalar":
        if field == self.field:
            return self
        if self.b:
            raise FieldMismatch(f"{self} is not rational")
        return Scalar._raw(field, self.a, self.b)

    def __float__(self):
        if not self.b:
            return float(self.a)
        return float(self.a) + float(self.b) * self.field.d ** 0.5

    def __repr__(self):
        if self.field.d is None:
            return f"Scalar(Q, {self.a})"
        return f"Scalar({self.field}, {self.a}, {self.b})"

    def __str__(self):
        if self.field.d is None:
            return str(self.a)
        return f"{self.a}{'+' if self.b >= 0 else '-'}{abs(self.b)}*sqrt({self.field.d})"


def sign(x: Scalar) -> Sign:
    """Exact sign of ``a + b*sqrt(d)``."""
    sa = _fsign(x.a)
    sb = _fsign(x.b)
    if sb == 0 or sa == sb:
        return Sign(sa or sb)
    if sa == 0:
        return Sign(sb)
    # strictly opposite signs: the part with the larger square dominates
    return Sign(sa if x.a * x.a > x.b * x.b * x.field.d else sb)


def _floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def floor_scaled(x: Scalar, N: int) -> int:
    """Return the integer ``k`` with ``k <= N*x < k + 1``."""
    if N < 1:
        raise ValueError("N must be a positive integer")
    a = x.a * N
    b = x.b * N
    if not b:
        return _floor_frac(a)
    # estimate floor(a) + floor(b*sqrt d) via isqrt, then correct exactly
    t = b * b * x.field.d
    root = isqrt(_floor_frac(t))
    k = _floor_frac(a) + (root if b > 0 else -root - 1)
    y = Scalar._raw(x.field, a, b)
    while sign(y - k) is Sign.MINUS:
        k -= 1
    while sign(y - (k + 1)) is not Sign.MINUS:
        k += 1
    return k


_RATIONAL_RE = re.compile(r"-?\d+(?:/\d+)?\Z")


def _parse_rational(text: str, offset: int = 0) -> Fraction:
    if not isinstance(text, str):
        raise ParseError(f"expected a rational string, got {text!r}", offset)
    text = text.replace("\u2212", "-")  # typographic minus
    if not _RATIONAL_RE.match(text):
        bad = next(
            (i for i, ch in enumerate(text) if not (ch.isdigit() or ch in "-/")),
            len(text),
        )
        raise ParseError(f"malformed rational {text!r}", offset + bad)
    num, _, den = text.partition("/")
    if den and int(den) == 0:
        raise ParseError(f"zero denominator in {text!r}", offset + len(num) + 1)
    return Fraction(int(num), int(den) if den else 1)


def parse_scalar(text, field: FieldTag) -> Scalar:
    """Parse a scalar from its JSON form.

    Over Q the input is a rational string such as ``"-3/4"``; over
    Q(sqrt d) it is a two-element list ``[a, b]`` of rational strings.
    """
    if field.d is None:
        return Scalar._raw(field, _parse_rational(text), Fraction(0))
    if not isinstance(text, (list, tuple)) or len(text) != 2:
        raise ParseError(f"expected [a, b] for {field}, got {text!r}", 0)
    return Scalar._raw(field, _parse_rational(text[0], 0), _parse_rational(text[1], 1))


def _format_rational(x: Fraction) -> str:
    return str(x)


def format_scalar(x: Scalar):
    if x.field.d is None:
        return _format_rational(x.a)
    return [_format_rational(x.a), _format_rational(x.b)]
