"""p-adic valuations of the power sums, closed-form predictors for v_2(T_k),
v_3(T_k) and v_3(S_k), the exponent bounds they imply, and brute-force
harnesses that check every predictor branch against exact arithmetic.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass
from enum import Enum
from typing import IO, Iterable, List, Optional, Tuple


def vp(m: int, p: int) -> int:
    """Largest v with p**v dividing m."""
    if m == 0:
        raise ValueError("vp(0) is undefined")
    if p < 2:
        raise ValueError("p must be a prime")
    m = abs(m)
    if p == 2:
        return (m & -m).bit_length() - 1
    v = 0
    while m % p == 0:
        m //= p
        v += 1
    return v


@dataclass(frozen=True)
class ValuationPrediction:
    covered: bool
    value: Optional[int]
    case_label: str

    def __post_init__(self):
        if self.covered != (self.value is not None):
            raise ValueError("value must be present exactly when covered")


NOT_COVERED = "not covered"


def _hit(value: int, label: str) -> ValuationPrediction:
    return ValuationPrediction(True, value, label)


def _miss(label: str = NOT_COVERED) -> ValuationPrediction:
    return ValuationPrediction(False, None, label)


# Branch labels. Every covered prediction carries exactly one of these.
V2_BRANCHES = (
    "v2T: x even, k=1 or k even",
    "v2T: x even, k>=3 odd",
    "v2T: x odd, k=1",
    "v2T: x=3,7 (8), k>=2",
    "v2T: x=1 (8), k=2",
    "v2T: x=1 (8), k=3",
    "v2T: x=5 (8), k>=3 odd",
    "v2T: x=5 (8), k>=2 even",
    "v2T: x=9 (16), k>=4 even",
    "v2T: x=9 (16), k>=5 odd",
    "v2T: x=17 (32), k>=4 even",
    "v2T: x=17 (32), k>=5 odd",
)

V3T_BRANCHES = (
    "v3T: k=1",
    "v3T: x=0 (3), k>=2 even",
    "v3T: x=0 (3), k>3 odd",
    "v3T: x=0 (3), k=3",
    "v3T: x=1,2 (3), k>=3 odd",
    "v3T: x=2,8 (9), k>=2 even",
    "v3T: x=1 (3), k>=2 even",
)

V3S_BRANCHES = (
    "v3S: k=1",
    "v3S: k even",
    "v3S: x=1 (3), k>=3 odd",
    "v3S: x=0,2 (3), k>=3 odd",
)


def _check_args(x: int, k: int) -> None:
    if x < 1 or k < 1:
        raise ValueError("need x >= 1 and k >= 1")


def predict_v2_T(x: int, k: int) -> ValuationPrediction:
    """Closed form for v_2(T_k(x)); uncovered for x = 1 (mod 32), k >= 4."""
    _check_args(x, k)
    b = V2_BRANCHES
    if x % 2 == 0:
        t = vp(x, 2)
        if k == 1 or k % 2 == 0:
            return _hit(t - 1, b[0])
        return _hit(2 * t - 2, b[1])
    if k == 1:
        return _hit(vp(3 * x + 1, 2) - 1, b[2])
    if x % 8 in (3, 7):
        return _hit(0, b[3])
    # x = 1, 5 (mod 8) from here on
    if x % 8 == 1 and k == 2:
        return _hit(vp(7 * x + 1, 2) - 1, b[4])
    if x % 8 == 1 and k == 3:
        return _hit(vp((5 * x + 3) * (3 * x + 1), 2) - 2, b[5])
    if x % 8 == 5:
        if k % 2 == 1:
            return _hit(vp(3 * x + 1, 2), b[6])
        return _hit(1, b[7])
    if x % 16 == 9:
        return _hit(2, b[8]) if k % 2 == 0 else _hit(3, b[9])
    if x % 32 == 17:
        return _hit(3, b[10]) if k % 2 == 0 else _hit(4, b[11])
    return _miss()


def predict_v3_T(x: int, k: int) -> ValuationPrediction:
    """Closed form for v_3(T_k(x)); uncovered for x = 5 (mod 9), k even."""
    _check_args(x, k)
    b = V3T_BRANCHES
    if k == 1:
        return _hit(vp(x, 3), b[0])
    r = x % 3
    if k % 2 == 1:
        if r != 0:
            return _hit(0, b[4])
        if k == 3:
            return _hit(vp(x * x * (5 * x + 3), 3), b[3])
        return _hit(vp(k * x * x, 3), b[2])
    if r == 0:
        return _hit(vp(x, 3) - 1, b[1])
    if r == 1:
        return _hit(vp(2 * x + 1, 3) - 1, b[6])
    if x % 9 in (2, 8):
        return _hit(0, b[5])
    return _miss()


def predict_v3_S(x: int, k: int) -> ValuationPrediction:
    """Closed form for v_3(S_k(x)); covers every (x, k)."""
    _check_args(x, k)
    b = V3S_BRANCHES
    if k == 1:
        return _hit(vp(x * (x + 1), 3), b[0])
    if k % 2 == 0:
        return _hit(vp(x * (x + 1) * (2 * x + 1), 3) - 1, b[1])
    if x % 3 == 1:
        return _hit(0, b[2])
    return _hit(vp(k * x * x * (x + 1) ** 2, 3) - 1, b[3])


class BoundKind(Enum):
    UPPER_BOUND = "UpperBound"
    NO_SOLUTION = "NoSolutionForNGe2"
    NOT_COVERED = "NotCovered"


@dataclass(frozen=True)
class BoundOutcome:
    kind: BoundKind
    n_max: Optional[int]
    case_label: str

    def __post_init__(self):
        if self.kind is BoundKind.UPPER_BOUND and (self.n_max is None or self.n_max < 2):
            raise ValueError("UpperBound requires n_max >= 2")

    def __str__(self) -> str:
        if self.kind is BoundKind.UPPER_BOUND:
            return f"UpperBound({self.n_max}) [{self.case_label}]"
        return f"{self.kind.value} [{self.case_label}]"


def _outcome(value: int, label: str) -> BoundOutcome:
    if value <= 1:
        return BoundOutcome(BoundKind.NO_SOLUTION, None, label)
    return BoundOutcome(BoundKind.UPPER_BOUND, value, label)


def exponent_bound(x: int, k: int, combine: bool = False) -> BoundOutcome:
    """Bound on n for T_k(x) = y^n from the 2- and 3-adic predictors.

    If p | T_k(x) then p | y, so n <= v_p(T_k(x)). A prediction is usable
    only when covered and positive. By default the 2-adic branch is tried
    before the 3-adic one and the first usable bound is returned; with
    ``combine`` the smaller of the two usable bounds is returned.
    """
    usable = []
    for pred in (predict_v2_T(x, k), predict_v3_T(x, k)):
        if pred.covered and pred.value > 0:
            usable.append(pred)
    if not usable:
        return BoundOutcome(BoundKind.NOT_COVERED, None, NOT_COVERED)
    if combine:
        best = min(usable, key=lambda p: p.value)
        return _outcome(best.value, best.case_label)
    return _outcome(usable[0].value, usable[0].case_label)


@dataclass(frozen=True)
class Mismatch:
    """One disagreement between a closed form and the exact value."""

    x: int
    k: int
    p: int
    predicted: int
    actual: int
    case_label: str


def write_records(records: Iterable[Mismatch], fp: IO[str]) -> int:
    """Write one JSON object per line; returns the record count."""
    n = 0
    for rec in records:
        fp.write(json.dumps(asdict(rec), sort_keys=True) + "\n")
        n += 1
    return n


def read_records(fp: IO[str]) -> List[Mismatch]:
    return [Mismatch(**json.loads(line)) for line in fp if line.strip()]


def _prefix_power_sums(k_max: int, m_max: int) -> List[List[int]]:
    """table[k][m] = S_k(m) by direct accumulation (index 0 unused for k)."""
    table = [[0] * (m_max + 1) for _ in range(k_max + 1)]
    for k in range(1, k_max + 1):
        row = table[k]
        acc = 0
        for m in range(1, m_max + 1):
            acc += m**k
            row[m] = acc
    return table


def verify_valuation_lemmas(
    x_max: int, k_max: int, x_min: int = 1
) -> Tuple[List[Mismatch], Counter]:
    """Compare predict_v2_T, predict_v3_T, predict_v3_S with exact valuations.

    Returns the mismatches (expected empty) and a Counter of how often each
    branch label was exercised; uncovered cases are counted under their
    predictor's "not covered" key.
    """
    sums = _prefix_power_sums(k_max, 2 * x_max)
    mismatches: List[Mismatch] = []
    hits: Counter = Counter()
    for k in range(1, k_max + 1):
        row = sums[k]
        for x in range(x_min, x_max + 1):
            t = row[2 * x] - row[x]
            s = row[x]
            for pred, value, p, tag in (
                (predict_v2_T(x, k), t, 2, "v2T"),
                (predict_v3_T(x, k), t, 3, "v3T"),
                (predict_v3_S(x, k), s, 3, "v3S"),
            ):
                if not pred.covered:
                    hits[f"{tag}: {NOT_COVERED}"] += 1
                    continue
                hits[pred.case_label] += 1
                actual = vp(value, p)
                if actual != pred.value:
                    mismatches.append(Mismatch(x, k, p, pred.value, actual, pred.case_label))
    return mismatches, hits


def digit_decomposition(m: int, p: int) -> Tuple[int, int, int]:
    """Write m = q p^d + r (p^d - 1)/(p - 1) with r = m mod p, q != r (mod p).

    d counts the trailing base-p digits of m equal to r. Returns (q, d, r).
    """
    r = m % p
    d, rest = 0, m
    while rest > 0 and rest % p == r:
        rest //= p
        d += 1
    return rest, d, r


def verify_congruence_lemmas(
    p: int, d_max: int, q_max: int, k_max: int, m_max: int, literal: bool = False
) -> List[Mismatch]:
    """Exhaustive check of two congruences for S_k modulo prime powers.

    1. S_k(q m1 + m2) = q S_k(m1) + S_k(m2) (mod p^d) whenever p^d divides
       m1 and m2, for 1 <= d <= d_max, 1 <= q <= q_max, m1, m2 <= m_max.
    2. For odd p and m = 0, -1, (p-1)/2 (mod p), with m written as in
       ``digit_decomposition``, S_k(m) mod p^d equals -p^(d-1) * c where
       c is q, q+1, q+1/2 respectively when (p-1) | k, and 0 otherwise.
       The m = (p-1)/2 family is only checked for even k.

    ``literal`` checks family 2 as it is usually quoted instead: c = 1 for
    m = 0 (mod p) and every k for m = (p-1)/2. Both readings have
    counterexamples, at m = 2p and at m = 1 respectively.

    Records use x for the argument of S_k; ``predicted`` and ``actual`` are
    residues mod p^d.
    """
    if p < 3:
        raise ValueError("p must be an odd prime")
    top = q_max * m_max + m_max
    sums = _prefix_power_sums(k_max, top)
    out: List[Mismatch] = []
    for d in range(1, d_max + 1):
        mod = p**d
        mults = range(0, m_max + 1, mod)
        for k in range(1, k_max + 1):
            row = sums[k]
            for q in range(1, q_max + 1):
                for m1 in mults:
                    for m2 in mults:
                        lhs = row[q * m1 + m2] % mod
                        rhs = (q * row[m1] + row[m2]) % mod
                        if lhs != rhs:
                            label = f"additivity d={d} q={q} m1={m1} m2={m2}"
                            out.append(Mismatch(q * m1 + m2, k, p, rhs, lhs, label))
    half = (p - 1) // 2
    cases = {0: "m=0 (p)", p - 1: "m=-1 (p)", half: "m=(p-1)/2 (p)"}
    sums = _prefix_power_sums(k_max, m_max)
    for m in range(1, m_max + 1):
        r = m % p
        if r not in cases:
            continue
        q, d, _ = digit_decomposition(m, p)
        mod = p**d
        for k in range(1, k_max + 1):
            if r == half and k % 2 == 1 and not literal:
                continue
            actual = sums[k][m] % mod
            if (k % (p - 1)) != 0:
                expected = 0
            else:
                if r == 0:
                    c = 1 if literal else q
                elif r == p - 1:
                    c = q + 1
                else:
                    c = (2 * q + 1) * pow(2, -1, mod)
                expected = (-(p ** (d - 1)) * c) % mod
            if actual != expected:
                out.append(Mismatch(m, k, p, expected, actual, f"digits {cases[r]} d={d} q={q}"))
    return out
