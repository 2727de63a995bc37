"""Reals with an explicit rounding direction, backed by MPFR.

A ``DirectedReal`` tagged DOWN is a certified lower bound of the quantity
it stands for, one tagged UP a certified upper bound. Every operation is
rounded by MPFR in the tag's direction, and the operand tags must be the
ones that keep the result a valid bound:

    UP + UP -> UP          UP - DOWN -> UP
    UP * UP -> UP          UP / DOWN -> UP        (non-negative operands)
    -UP -> DOWN            log, sqrt, exp, n-th root keep the tag

and symmetrically for DOWN. Anything else raises ``RoundingMismatch``.
Python ints, Fractions and decimal strings are exact and are converted in
whichever direction the operation needs.
"""
from __future__ import annotations

import contextlib
import math
from contextvars import ContextVar
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Union

import gmpy2

DEFAULT_DIGITS = 60
_digits: ContextVar[int] = ContextVar("working_digits", default=DEFAULT_DIGITS)


def working_digits() -> int:
    return _digits.get()


@contextlib.contextmanager
def precision(digits: int):
    """Temporarily change the working precision (significant decimal digits)."""
    if digits < 15:
        raise ValueError("precision below 15 digits is not supported")
    token = _digits.set(digits)
    try:
        yield
    finally:
        _digits.reset(token)


def _bits() -> int:
    return math.ceil(_digits.get() * math.log2(10)) + 8


class Rounding(Enum):
    DOWN = -1
    UP = 1

    @property
    def opposite(self) -> "Rounding":
        return Rounding.UP if self is Rounding.DOWN else Rounding.DOWN

    @property
    def mpfr_mode(self):
        return gmpy2.RoundDown if self is Rounding.DOWN else gmpy2.RoundUp


DOWN = Rounding.DOWN
UP = Rounding.UP


class RoundingMismatch(ValueError):
    """Operands carry directions that cannot produce a valid bound."""


Exact = Union[int, Fraction, str, Decimal]


def _ctx(rounding: Rounding):
    return gmpy2.context(gmpy2.get_context(), precision=_bits(), round=rounding.mpfr_mode)


def _to_mpq(value: Exact):
    q = Fraction(value)
    return gmpy2.mpq(q.numerator, q.denominator)


class DirectedReal:
    __slots__ = ("value", "rounding")

    def __init__(self, value, rounding: Rounding):
        if not isinstance(rounding, Rounding):
            raise TypeError("rounding must be a Rounding")
        if isinstance(value, (int, Fraction, str, Decimal)):
            with _ctx(rounding):
                value = gmpy2.mpfr(_to_mpq(value))
        elif not isinstance(value, type(gmpy2.mpfr(0))):
            raise TypeError(f"cannot build a DirectedReal from {type(value).__name__}")
        if gmpy2.is_nan(value):
            raise ArithmeticError("NaN in directed computation")
        self.value = value
        self.rounding = rounding

    @classmethod
    def down(cls, value: Exact) -> "DirectedReal":
        return cls(value, DOWN)

    @classmethod
    def up(cls, value: Exact) -> "DirectedReal":
        return cls(value, UP)

    def retag(self, rounding: Rounding) -> "DirectedReal":
        """Same number, other tag. Only sound when the value is itself the
        exact quantity (e.g. a parameter chosen as this very number)."""
        return DirectedReal(self.value, rounding)

    def _coerce(self, other, rounding: Rounding) -> "DirectedReal":
        if isinstance(other, DirectedReal):
            if other.rounding is not rounding:
                raise RoundingMismatch(
                    f"expected a {rounding.name} operand, got {other.rounding.name}"
                )
            return other
        if isinstance(other, (int, Fraction, str, Decimal)):
            return DirectedReal(other, rounding)
        return NotImplemented

    def _op(self, fn, other, other_rounding: Rounding):
        o = self._coerce(other, other_rounding)
        if o is NotImplemented:
            return o
        with _ctx(self.rounding):
            return DirectedReal(fn(self.value, o.value), self.rounding)

    def __add__(self, other):
        return self._op(lambda a, b: a + b, other, self.rounding)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        return self._op(lambda a, b: a - b, other, self.rounding.opposite)

    def __rsub__(self, other):
        # c - self lands in the direction opposite to self
        return DirectedReal(other, self.rounding.opposite) - self

    def __neg__(self):
        return DirectedReal(-self.value, self.rounding.opposite)

    def _check_nonneg(self, *xs) -> None:
        for x in xs:
            if x.value < 0:
                raise RoundingMismatch("multiplicative operations need non-negative operands")

    def __mul__(self, other):
        o = self._coerce(other, self.rounding)
        if o is NotImplemented:
            return o
        self._check_nonneg(self, o)
        with _ctx(self.rounding):
            return DirectedReal(self.value * o.value, self.rounding)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        o = self._coerce(other, self.rounding.opposite)
        if o is NotImplemented:
            return o
        self._check_nonneg(self, o)
        if o.value == 0:
            raise ZeroDivisionError("division by a zero bound")
        with _ctx(self.rounding):
            return DirectedReal(self.value / o.value, self.rounding)

    def __rtruediv__(self, other):
        # c / self: the result takes the opposite of self's direction
        return DirectedReal(other, self.rounding.opposite) / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        self._check_nonneg(self)
        with _ctx(self.rounding):
            return DirectedReal(self.value**n, self.rounding)

    def __lt__(self, other):
        return self.value < _plain(other)

    def __le__(self, other):
        return self.value <= _plain(other)

    def __gt__(self, other):
        return self.value > _plain(other)

    def __ge__(self, other):
        return self.value >= _plain(other)

    def __eq__(self, other):
        if isinstance(other, DirectedReal):
            return self.value == other.value and self.rounding is other.rounding
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.rounding))

    def __float__(self):
        return float(self.value)

    def to_fraction(self) -> Fraction:
        q = gmpy2.mpq(self.value)
        return Fraction(int(q.numerator), int(q.denominator))

    def decimal_str(self, places: int) -> str:
        """Fixed-point string rounded in this value's direction."""
        q = self.to_fraction() * 10**places
        n = math.floor(q) if self.rounding is DOWN else math.ceil(q)
        sign = "-" if n < 0 else ""
        n = abs(n)
        if places == 0:
            return f"{sign}{n}"
        s = str(n).rjust(places + 1, "0")
        return f"{sign}{s[:-places]}.{s[-places:]}"

    def __repr__(self) -> str:
        return f"DirectedReal({self.decimal_str(12)}, {self.rounding.name})"


def _plain(other):
    if isinstance(other, DirectedReal):
        return other.value
    if isinstance(other, (str, Decimal, Fraction)):
        return _to_mpq(other)
    return other


def _unary(fn, x: DirectedReal, domain_ok) -> DirectedReal:
    if not domain_ok(x.value):
        raise ValueError(f"argument outside the domain: {x!r}")
    with _ctx(x.rounding):
        return DirectedReal(fn(x.value), x.rounding)


def log(x) -> DirectedReal:
    return _unary(gmpy2.log, x, lambda v: v > 0)


def sqrt(x) -> DirectedReal:
    return _unary(gmpy2.sqrt, x, lambda v: v >= 0)


def exp(x) -> DirectedReal:
    return _unary(gmpy2.exp, x, lambda v: True)


def root(x: DirectedReal, n: int) -> DirectedReal:
    """x^(1/n) for x >= 0."""
    return _unary(lambda v: gmpy2.rootn(v, n), x, lambda v: v >= 0)


def log_exact(value: Exact, rounding: Rounding) -> DirectedReal:
    """log of an exact positive rational, rounded once in ``rounding``."""
    if _to_mpq(value) <= 0:
        raise ValueError("log of a non-positive number")
    # the conversion is rounded the same way and log is increasing
    return log(DirectedReal(value, rounding))


def dmax(*xs: DirectedReal) -> DirectedReal:
    tags = {x.rounding for x in xs}
    if len(tags) != 1:
        raise RoundingMismatch("max over mixed directions")
    return max(xs, key=lambda x: x.value)


class Enclosure(NamedTuple):
    """A lower and an upper bound for the same real number."""

    lo: DirectedReal
    hi: DirectedReal

    @classmethod
    def exact(cls, value: Exact) -> "Enclosure":
        return cls(DirectedReal(value, DOWN), DirectedReal(value, UP))

    @classmethod
    def of(cls, fn) -> "Enclosure":
        """Evaluate ``fn(rounding)`` in both directions."""
        lo, hi = fn(DOWN), fn(UP)
        if lo.rounding is not DOWN or hi.rounding is not UP:
            raise RoundingMismatch("enclosure halves carry the wrong tags")
        return cls(lo, hi)

    def pick(self, rounding: Rounding) -> DirectedReal:
        return self.lo if rounding is DOWN else self.hi

    @property
    def width(self) -> float:
        return float(self.hi.value - self.lo.value)

    def __repr__(self) -> str:
        return f"[{self.lo.decimal_str(10)}, {self.hi.decimal_str(10)}]"
