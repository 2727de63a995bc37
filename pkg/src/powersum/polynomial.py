"""Dense univariate polynomials with exact rational coefficients."""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]


class RationalPolynomial:
    """Immutable polynomial, coefficients stored lowest degree first.

    Trailing zero coefficients are stripped on construction, so the zero
    polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self._coeffs = tuple(cs)

    @classmethod
    def monomial(cls, degree: int, coeff: Scalar = 1) -> "RationalPolynomial":
        return cls([0] * degree + [coeff])

    @classmethod
    def from_roots(cls, roots: Sequence[Scalar]) -> "RationalPolynomial":
        p = cls([1])
        for r in roots:
            p = p * cls([-Fraction(r), 1])
        return p

    @property
    def coeffs(self) -> tuple:
        return self._coeffs

    @property
    def degree(self) -> int:
        return len(self._coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self._coeffs[-1] if self._coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self._coeffs

    def __call__(self, t: Scalar) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self._coeffs):
            acc = acc * t + c
        return acc

    def eval_int(self, x: int) -> Fraction:
        """Horner evaluation at an integer using a common denominator."""
        if not self._coeffs:
            return Fraction(0)
        den = 1
        for c in self._coeffs:
            den = lcm(den, c.denominator)
        acc = 0
        for c in reversed(self._coeffs):
            acc = acc * x + c.numerator * (den // c.denominator)
        return Fraction(acc, den)

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalPolynomial):
            return self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction)):
            return self == RationalPolynomial([other])
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __repr__(self) -> str:
        if not self._coeffs:
            return "RationalPolynomial(0)"
        terms = []
        for i, c in enumerate(self._coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(f"{c}")
            elif i == 1:
                terms.append(f"({c})*x")
            else:
                terms.append(f"({c})*x^{i}")
        return "RationalPolynomial(" + " + ".join(terms) + ")"

    @staticmethod
    def _coerce(other) -> "RationalPolynomial":
        if isinstance(other, RationalPolynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return RationalPolynomial([other])
        raise TypeError(f"cannot combine polynomial with {type(other).__name__}")

    def __add__(self, other) -> "RationalPolynomial":
        o = self._coerce(other)
        n = max(len(self._coeffs), len(o._coeffs))
        a = self._coeffs + (Fraction(0),) * (n - len(self._coeffs))
        b = o._coeffs + (Fraction(0),) * (n - len(o._coeffs))
        return RationalPolynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> "RationalPolynomial":
        return RationalPolynomial(-c for c in self._coeffs)

    def __sub__(self, other) -> "RationalPolynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RationalPolynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RationalPolynomial":
        o = self._coerce(other)
        if self.is_zero() or o.is_zero():
            return RationalPolynomial()
        out = [Fraction(0)] * (len(self._coeffs) + len(o._coeffs) - 1)
        for i, a in enumerate(self._coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o._coeffs):
                out[i + j] += a * b
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def __divmod__(self, other) -> tuple:
        d = self._coerce(other)
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self._coeffs)
        quot = [Fraction(0)] * max(len(rem) - d.degree, 1)
        lead = d.leading
        while len(rem) - 1 >= d.degree and any(rem):
            shift = len(rem) - 1 - d.degree
            factor = rem[-1] / lead
            quot[shift] = factor
            for j, c in enumerate(d._coeffs):
                rem[shift + j] -= factor * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return RationalPolynomial(quot), RationalPolynomial(rem)

    def __floordiv__(self, other) -> "RationalPolynomial":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "RationalPolynomial":
        return divmod(self, other)[1]

    def divides(self, other: "RationalPolynomial") -> bool:
        """True when ``self`` divides ``other`` over the rationals."""
        return (other % self).is_zero()

    def compose_affine(self, a: Scalar, b: Scalar) -> "RationalPolynomial":
        """Return p(a*x + b)."""
        inner = RationalPolynomial([b, a])
        acc = RationalPolynomial()
        for c in reversed(self._coeffs):
            acc = acc * inner + c
        return acc
