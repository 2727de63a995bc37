"""Exact arithmetic kernels: Bernoulli numbers and polynomials, the power
sums S_k and T_k, their polynomial forms, and perfect-power detection.

Integers are Python ``int`` and rationals are ``fractions.Fraction``; both
are arbitrary precision, immutable and already canonical (a Fraction is
always in lowest terms with a positive denominator).
"""
from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import List, Optional, Tuple

from .polynomial import RationalPolynomial

__all__ = [
    "bernoulli_number",
    "bernoulli_poly",
    "bernoulli_polynomial",
    "power_sum_S",
    "power_sum_T",
    "t_polynomial",
    "structural_factor_check",
    "integer_root",
    "is_nth_power",
    "perfect_power_witnesses",
    "primes_up_to",
]

_bern_lock = threading.Lock()
_bern: List[Fraction] = [Fraction(1)]


def bernoulli_number(m: int) -> Fraction:
    """B_m with B_1 = -1/2, from sum_{i<=m} C(m+1, i) B_i = 0."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if m < len(_bern):
        return _bern[m]
    with _bern_lock:
        while len(_bern) <= m:
            j = len(_bern)
            if j > 1 and j % 2 == 1:
                _bern.append(Fraction(0))
                continue
            s = sum(comb(j + 1, i) * _bern[i] for i in range(j))
            _bern.append(-s / (j + 1))
    return _bern[m]


@lru_cache(maxsize=None)
def bernoulli_polynomial(q: int) -> RationalPolynomial:
    """B_q(t) = sum_i C(q, i) B_i t^(q-i) as a polynomial in t."""
    if q < 0:
        raise ValueError("q must be >= 0")
    coeffs = [Fraction(0)] * (q + 1)
    for i in range(q + 1):
        coeffs[q - i] = comb(q, i) * bernoulli_number(i)
    return RationalPolynomial(coeffs)


def bernoulli_poly(q: int, t) -> Fraction:
    return bernoulli_polynomial(q)(Fraction(t))


def _direct_sum(k: int, lo: int, hi: int) -> int:
    return sum(j**k for j in range(lo, hi + 1))


def _s_bernoulli(k: int, x: int) -> int:
    b = bernoulli_polynomial(k + 1)
    val = (b.eval_int(x + 1) - bernoulli_number(k + 1)) / (k + 1)
    assert val.denominator == 1
    return val.numerator


def _prefer_direct(k: int, x: int) -> bool:
    # direct costs ~x big-int powers, the polynomial ~k^2 rationals once
    return x <= 2 * k + 16


def power_sum_S(k: int, x: int, method: str = "auto", verify: bool = False) -> int:
    """S_k(x) = 1^k + ... + x^k.

    ``method`` is "direct", "bernoulli" or "auto". With ``verify`` both
    paths run and must agree.
    """
    if k < 1 or x < 0:
        raise ValueError("need k >= 1 and x >= 0")
    if verify:
        a, b = _direct_sum(k, 1, x), _s_bernoulli(k, x)
        if a != b:
            raise ArithmeticError(f"S_{k}({x}) paths disagree: {a} != {b}")
        return a
    if method == "auto":
        method = "direct" if _prefer_direct(k, x) else "bernoulli"
    if method == "direct":
        return _direct_sum(k, 1, x)
    if method == "bernoulli":
        return _s_bernoulli(k, x)
    raise ValueError(f"unknown method {method!r}")


def _t_bernoulli(k: int, x: int) -> int:
    b = bernoulli_polynomial(k + 1)
    val = (b.eval_int(2 * x + 1) - b.eval_int(x + 1)) / (k + 1)
    assert val.denominator == 1
    return val.numerator


def power_sum_T(k: int, x: int, method: str = "auto", verify: bool = False) -> int:
    """T_k(x) = (x+1)^k + ... + (2x)^k.

    Paths: "direct" summation, "bernoulli" (difference of B_{k+1} values),
    "difference" (S_k(2x) - S_k(x)). ``verify`` runs all three.
    """
    if k < 1 or x < 1:
        raise ValueError("need k >= 1 and x >= 1")
    if verify:
        vals = {
            _direct_sum(k, x + 1, 2 * x),
            _t_bernoulli(k, x),
            power_sum_S(k, 2 * x) - power_sum_S(k, x),
        }
        if len(vals) != 1:
            raise ArithmeticError(f"T_{k}({x}) paths disagree: {sorted(vals)}")
        return vals.pop()
    if method == "auto":
        method = "direct" if _prefer_direct(k, x) else "bernoulli"
    if method == "direct":
        return _direct_sum(k, x + 1, 2 * x)
    if method == "bernoulli":
        return _t_bernoulli(k, x)
    if method == "difference":
        return power_sum_S(k, 2 * x) - power_sum_S(k, x)
    raise ValueError(f"unknown method {method!r}")


@lru_cache(maxsize=None)
def t_polynomial(k: int) -> RationalPolynomial:
    """Degree k+1 polynomial P with P(x) = T_k(x) for integers x >= 1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    b = bernoulli_polynomial(k + 1)
    diff = b.compose_affine(2, 1) - b.compose_affine(1, 1)
    return diff * Fraction(1, k + 1)


def structural_factor_check(k: int) -> bool:
    """x(2x+1) | T_k for even k, x^2(3x+1) | T_k for odd k (as Q[x] polys)."""
    if k < 2:
        raise ValueError("k must be >= 2; k = 1 has its own closed form")
    if k % 2 == 0:
        divisor = RationalPolynomial([0, 1, 2])  # x(2x+1)
    else:
        divisor = RationalPolynomial([0, 0, 1, 3])  # x^2(3x+1)
    return divisor.divides(t_polynomial(k))


def integer_root(m: int, n: int) -> int:
    """floor(m^(1/n)) by bisection inside the bit-length bracket."""
    if m < 0 or n < 1:
        raise ValueError("need m >= 0 and n >= 1")
    if m < 2 or n == 1:
        return m
    b = m.bit_length()
    lo = 1 << ((b - 1) // n)
    hi = 1 << ((b - 1) // n + 1)
    # invariant: lo^n <= m < hi^n
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid**n <= m:
            lo = mid
        else:
            hi = mid
    return lo


def is_nth_power(m: int, n: int) -> Optional[int]:
    """Return y with y**n == m, or None."""
    if m < 1 or n < 2:
        raise ValueError("need m >= 1 and n >= 2")
    y = integer_root(m, n)
    return y if y**n == m else None


def primes_up_to(limit: int) -> List[int]:
    if limit < 2:
        return []
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, int(limit**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, limit + 1, i)))
    return [i for i, v in enumerate(sieve) if v]


def _perfect_power_base(m: int) -> Tuple[int, int]:
    """Write m = b^e with b not itself a perfect power."""
    base, exp = m, 1
    changed = True
    while changed and base > 3:
        changed = False
        for p in primes_up_to(base.bit_length()):
            r = is_nth_power(base, p)
            if r is not None:
                base, exp = r, exp * p
                changed = True
                break
    return base, exp


def perfect_power_witnesses(m: int, n_min: int, n_max: int) -> List[Tuple[int, int]]:
    """All (y, n) with y**n == m, y >= 2 and n_min <= n <= n_max, by n.

    Only prime exponents are scanned: once m = b^e with b not a perfect
    power, every representation is (b^(e/n), n) for a divisor n of e.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    if not 2 <= n_min <= n_max:
        raise ValueError("need 2 <= n_min <= n_max")
    base, exp = _perfect_power_base(m)
    return [
        (base ** (exp // n), n)
        for n in range(n_min, min(n_max, exp) + 1)
        if exp % n == 0
    ]
