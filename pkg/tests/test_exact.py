from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powersum.exact import (
    bernoulli_number,
    bernoulli_poly,
    bernoulli_polynomial,
    integer_root,
    is_nth_power,
    perfect_power_witnesses,
    power_sum_S,
    power_sum_T,
    primes_up_to,
    structural_factor_check,
    t_polynomial,
)
from powersum.polynomial import RationalPolynomial


def series_bernoulli(m_max):
    """B_m from the power series z/(e^z - 1) = 1 / (sum z^j/(j+1)!)."""
    a = [Fraction(1, _fact(j + 1)) for j in range(m_max + 1)]
    inv = [Fraction(0)] * (m_max + 1)
    inv[0] = 1 / a[0]
    for n in range(1, m_max + 1):
        inv[n] = -sum(a[j] * inv[n - j] for j in range(1, n + 1)) / a[0]
    return [inv[m] * _fact(m) for m in range(m_max + 1)]


def _fact(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


SERIES = series_bernoulli(30)


@pytest.mark.parametrize("m, expected", [(0, Fraction(1)), (1, Fraction(-1, 2)), (12, Fraction(-691, 2730))])
def test_bernoulli_examples(m, expected):
    assert bernoulli_number(m) == expected
    assert SERIES[m] == expected


def test_bernoulli_matches_series():
    assert [bernoulli_number(m) for m in range(31)] == SERIES


def test_bernoulli_rejects_negative():
    with pytest.raises(ValueError):
        bernoulli_number(-1)


@pytest.mark.parametrize("q, t, expected", [
    (1, 1, Fraction(1, 2)),
    (3, 1, Fraction(0)),
    (2, Fraction(1, 2), Fraction(-1, 12)),
])
def test_bernoulli_poly_examples(q, t, expected):
    assert bernoulli_poly(q, t) == expected


def test_bernoulli_poly_expansion():
    # B_q(t) = sum binom(q, i) B_i t^(q-i), built here from the series oracle
    for q in range(12):
        for t in (Fraction(0), Fraction(1), Fraction(-3, 7), Fraction(5, 2)):
            want = sum(comb(q, i) * SERIES[i] * t ** (q - i) for i in range(q + 1))
            assert bernoulli_poly(q, t) == want


small_rationals = st.fractions(min_value=-5, max_value=5, max_denominator=12)


@settings(max_examples=60, deadline=None)
@given(q=st.integers(0, 20), t=small_rationals)
def test_reflection(q, t):
    assert bernoulli_poly(q, 1 - t) == (-1) ** q * bernoulli_poly(q, t)


@settings(max_examples=60, deadline=None)
@given(q=st.integers(1, 20), t=small_rationals)
def test_duplication(q, t):
    lhs = bernoulli_poly(q, t) + bernoulli_poly(q, t + Fraction(1, 2))
    assert lhs == Fraction(2) ** (1 - q) * bernoulli_poly(q, 2 * t)


@pytest.mark.parametrize("k, x, expected", [(1, 4, 10), (2, 24, 4900), (3, 3, 36)])
def test_power_sum_S_examples(k, x, expected):
    for method in ("direct", "bernoulli", "auto"):
        assert power_sum_S(k, x, method=method) == expected


@pytest.mark.parametrize("k, x, expected", [(1, 2, 7), (2, 2, 25), (3, 3, 405)])
def test_power_sum_T_examples(k, x, expected):
    for method in ("direct", "bernoulli", "difference", "auto"):
        assert power_sum_T(k, x, method=method) == expected
    assert sum(j**k for j in range(x + 1, 2 * x + 1)) == expected


def test_T3_closed_form():
    for x in range(1, 40):
        assert 4 * power_sum_T(3, x) == x * x * (5 * x + 3) * (3 * x + 1)


def test_power_sum_zero_x():
    assert power_sum_S(5, 0) == 0


@pytest.mark.parametrize("bad", [(0, 3), (2, -1)])
def test_power_sum_S_rejects(bad):
    with pytest.raises(ValueError):
        power_sum_S(*bad)


def test_power_sum_T_rejects_x0():
    with pytest.raises(ValueError):
        power_sum_T(2, 0)


@settings(max_examples=80, deadline=None)
@given(k=st.integers(1, 30), x=st.integers(1, 300))
def test_T_paths_agree(k, x):
    direct = sum(j**k for j in range(x + 1, 2 * x + 1))
    assert power_sum_T(k, x, verify=True) == direct
    assert power_sum_S(k, 2 * x) - power_sum_S(k, x) == direct


def test_t_polynomial_examples():
    assert t_polynomial(1).coeffs == (0, Fraction(1, 2), Fraction(3, 2))
    x = RationalPolynomial([0, 1])
    t3 = x * x * RationalPolynomial([3, 5]) * RationalPolynomial([1, 3])
    assert t_polynomial(3) == RationalPolynomial([c / 4 for c in t3.coeffs])
    assert t_polynomial(2)(2) == 25


@pytest.mark.parametrize("k", range(1, 16))
def test_t_polynomial_degree_and_values(k):
    p = t_polynomial(k)
    assert p.degree == k + 1
    for x in range(1, 12):
        assert p.eval_int(x) == sum(j**k for j in range(x + 1, 2 * x + 1))


@pytest.mark.parametrize("k", range(2, 41))
def test_structural_factor(k):
    assert structural_factor_check(k)


def test_structural_factor_rejects_k1():
    with pytest.raises(ValueError):
        structural_factor_check(1)


@pytest.mark.parametrize("m, n, expected", [(4900, 2, 70), (1, 7, 1), (405, 3, None)])
def test_is_nth_power_examples(m, n, expected):
    assert is_nth_power(m, n) == expected


def test_is_nth_power_grid():
    for y in range(2, 51):
        for n in range(2, 13):
            assert is_nth_power(y**n, n) == y
            assert is_nth_power(y**n + 1, n) is None


@settings(max_examples=100, deadline=None)
@given(m=st.integers(1, 10**60), n=st.integers(1, 40))
def test_integer_root_brackets(m, n):
    r = integer_root(m, n)
    assert r**n <= m < (r + 1) ** n


@pytest.mark.parametrize("m, lo, hi, expected", [
    (64, 2, 6, [(8, 2), (4, 3), (2, 6)]),
    (25, 3, 5, []),
    (4900, 2, 3, [(70, 2)]),
])
def test_witness_examples(m, lo, hi, expected):
    assert perfect_power_witnesses(m, lo, hi) == expected


@settings(max_examples=80, deadline=None)
@given(b=st.integers(2, 60), e=st.integers(1, 24))
def test_witnesses_against_brute_force(b, e):
    m = b**e
    hi = 2 * m.bit_length()
    brute = [(is_nth_power(m, n), n) for n in range(2, hi + 1) if is_nth_power(m, n)]
    assert perfect_power_witnesses(m, 2, hi) == brute


def test_primes_up_to():
    assert primes_up_to(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert primes_up_to(1) == []


def test_bernoulli_polynomial_is_cached_object():
    assert bernoulli_polynomial(7) is bernoulli_polynomial(7)


def test_bernoulli_thread_safety():
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(8) as ex:
        got = list(ex.map(bernoulli_number, range(60, 0, -1)))
    assert got == [bernoulli_number(m) for m in range(60, 0, -1)]
