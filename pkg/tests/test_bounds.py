import os
from fractions import Fraction

import mpmath
import pytest

from powersum.baker import reference
from powersum.baker.bounds import (
    case_setup,
    certify_bound,
    constants_at,
    contradiction_rhs,
    contradiction_rhs_k,
    derive_bound,
    h_parameter,
    reproduce_tables,
    write_tables,
    y_is_odd,
)
from powersum.baker.directed import DOWN, UP, Enclosure, precision
from powersum.baker.laurent import (
    LaurentHypothesisError,
    laurent_constants,
    sigma_exact,
    sigma_lambda,
)

mpmath.mp.dps = 80


def mp_constants(rho, mu, a1, a2, h):
    """Round-to-nearest reference for every constant."""
    rho, mu, a1, a2, h = (mpmath.mpf(Fraction(v).numerator) / Fraction(v).denominator
                          if isinstance(v, (int, Fraction)) else mpmath.mpf(v) for v in (rho, mu, a1, a2, h))
    sig = (1 + 2 * mu - mu**2) / 2
    lam = sig * mpmath.log(rho)
    H = h / lam + 1 / sig
    s = mpmath.sqrt(1 + 1 / (4 * H**2))
    om = 2 + 2 * s
    th = s + 1 / (2 * H)
    inner = (om**2 / 9 + 8 * lam * om ** mpmath.mpf(1.25) * th ** mpmath.mpf(0.25) / (3 * mpmath.sqrt(a1 * a2 * H))
             + mpmath.mpf(4) / 3 * (1 / a1 + 1 / a2) * lam * om / H)
    C0 = (om / 6 + mpmath.sqrt(inner) / 2) ** 2
    C = C0 * mu / (lam**3 * sig)
    Cp = mpmath.sqrt(C * sig * om * th / (lam**3 * mu))
    return {"H": H, "omega": om, "theta": th, "C0": C0, "C": C, "Cprime": Cp, "hprime": h + lam / sig}


def _f(d):
    return mpmath.mpf(d.to_fraction().numerator) / d.to_fraction().denominator


def test_sigma_examples():
    assert sigma_exact(Fraction(57, 100)) == Fraction(90755, 100000)
    assert sigma_exact(1) == 1
    assert sigma_exact(Fraction(1, 3)) == Fraction(7, 9)
    sig, lam = sigma_lambda(Fraction(77, 10), Fraction(57, 100))
    assert sig.lo.to_fraction() <= Fraction("0.90755") <= sig.hi.to_fraction()
    assert f"{float(sig.hi):.5f}" == f"{float(sig.lo):.5f}" == "0.90755"
    truth = mpmath.mpf("0.90755") * mpmath.log(mpmath.mpf("7.7"))
    assert _f(lam.lo) <= truth <= _f(lam.hi)
    assert str(truth).startswith("1.85250")  # independent oracle value


@pytest.mark.parametrize("rho, mu", [(1, Fraction(1, 2)), (2, Fraction(1, 4)), (2, Fraction(11, 10))])
def test_sigma_lambda_domain(rho, mu):
    with pytest.raises(ValueError):
        sigma_lambda(rho, mu)


def _exact(v):
    return Enclosure.exact(v)


def test_laurent_hypotheses():
    rho, mu = Fraction(77, 10), Fraction(57, 100)
    with pytest.raises(LaurentHypothesisError):
        laurent_constants(rho, mu, _exact(1), _exact(1), _exact(10))  # a1 a2 < lambda^2
    with pytest.raises(LaurentHypothesisError):
        laurent_constants(rho, mu, _exact(20), _exact(20), _exact(1))  # h < lambda
    with pytest.raises(LaurentHypothesisError):
        laurent_constants(rho, mu, _exact(Fraction(1, 2)), _exact(100), _exact(10))


@pytest.mark.parametrize("a1, a2, h", [(20, 30, 8), (Fraction(101, 3), 17, Fraction(25, 2)), (5, 5, 3)])
def test_constants_bracket_reference(a1, a2, h):
    rho, mu = Fraction(77, 10), Fraction(57, 100)
    c = laurent_constants(rho, mu, _exact(a1), _exact(a2), _exact(h))
    ref = mp_constants(rho, mu, a1, a2, h)
    assert _f(c.H) <= ref["H"]
    for name in ("omega", "theta", "C0", "C", "Cprime", "hprime"):
        got = _f(getattr(c, name))
        assert got >= ref[name], name
        assert got - ref[name] < mpmath.mpf(10) ** -50


def test_constants_directions():
    c = constants_at(case_setup(2, "I"), 7500)
    assert c.H.rounding is DOWN
    for name in ("omega", "theta", "C0", "C", "Cprime", "hprime"):
        assert getattr(c, name).rounding is UP


def test_case_I_x2_against_table():
    c = constants_at(case_setup(2, "I"), 7500)
    assert c.H >= Fraction("6.11")
    assert c.omega <= Fraction("4.0067")
    assert c.theta <= Fraction("1.0852")
    assert c.C0 <= Fraction("2.3688")
    assert c.C <= Fraction("0.2341")
    assert c.Cprime <= Fraction("0.51")


@pytest.mark.parametrize("x, case, v, H, C", [(2, "II", 3200, "5.04", "0.1587"), (2, "III", 45000, "7.50", "0.2947")])
def test_other_cases_against_tables(x, case, v, H, C):
    c = constants_at(case_setup(x, case), v)
    assert c.H >= Fraction(H) and c.C <= Fraction(C)


@pytest.mark.parametrize("x, case, eps", [(2, "I", "0.3560"), (11, "II", "-0.6339"), (6, "III", "-0.6935")])
def test_h_parameter_eps(x, case, eps):
    h, e = h_parameter(x, case, 1000)
    assert e.rounding is UP
    # published values sit on the safe side, at most a few 1e-4 above
    assert Fraction(eps) - Fraction(5, 10**4) < e.to_fraction() <= Fraction(eps) + Fraction(5, 10**5)
    assert h.lo.to_fraction() <= h.hi.to_fraction()


def test_h_parameter_floor_at_tiny_v():
    # log 2 + eps falls below lambda for case III x = 11; h is then lambda itself
    h, _ = h_parameter(11, "III", 2)
    _, lam = sigma_lambda(Fraction(62, 10), Fraction(57, 100))
    assert h.hi.to_fraction() >= lam.hi.to_fraction()


def test_rhs_examples():
    s = case_setup(2, "I")
    assert contradiction_rhs(s, constants_at(s, 7500), 7501) < 7501
    s3 = case_setup(3, "II")
    assert contradiction_rhs(s3, constants_at(s3, 10000), 10001) < 10001
    assert contradiction_rhs(s, constants_at(s, 100), 100) > 100
    k2 = case_setup(2, "III")
    assert contradiction_rhs_k(k2, constants_at(k2, 45000), 45001) < 45001
    assert contradiction_rhs_k(k2, constants_at(k2, 1000), 1000) > 1000
    k11 = case_setup(11, "III")
    assert contradiction_rhs_k(k11, constants_at(k11, 1750000), 1750001) < 1750001


def test_rhs_preconditions():
    s = case_setup(2, "I")
    with pytest.raises(ValueError):
        contradiction_rhs(s, constants_at(s, 100), 2)
    k = case_setup(2, "III")
    with pytest.raises(ValueError):
        contradiction_rhs_k(k, constants_at(k, 100), 82)
    with pytest.raises(ValueError):
        contradiction_rhs(k, constants_at(k, 100), 100)


@pytest.mark.parametrize("x, case, bound", [(2, "I", 7500), (10, "II", 157000), (7, "III", 740000)])
def test_certify_examples(x, case, bound):
    rep = certify_bound(x, case)
    assert rep.published_bound == bound
    assert rep.reproduced, rep.checks


def test_certify_failure_reports_first_violation():
    rep = certify_bound(2, "I", bound=200)
    assert not rep.reproduced
    assert rep.first_violation == 201


def test_derived_bounds_below_published():
    for x, case in [(2, "I"), (3, "II"), (2, "III")]:
        d = derive_bound(x, case)
        assert d <= reference.bound_for(x, case)
        assert certify_bound(x, case, bound=d).reproduced
        assert not certify_bound(x, case, bound=d - 1).reproduced


def test_y_odd_for_all_baker_x():
    for x in reference.XS:
        assert y_is_odd(x)
        for k in range(1, 40):
            assert sum(j**k for j in range(x + 1, 2 * x + 1)) % 2 == 1
    assert not y_is_odd(4)


def test_precision_doubling_is_sound():
    rho, mu = Fraction(96, 10), Fraction(57, 100)
    a1, a2, h = Fraction(4123, 100), Fraction(1187, 100), Fraction(861, 100)
    with precision(60):
        lo = laurent_constants(rho, mu, _exact(a1), _exact(a2), _exact(h))
    with precision(120):
        hi = laurent_constants(rho, mu, _exact(a1), _exact(a2), _exact(h))
    assert hi.H.to_fraction() >= lo.H.to_fraction()
    for name in ("omega", "theta", "C0", "C", "Cprime", "hprime"):
        assert getattr(hi, name).to_fraction() <= getattr(lo, name).to_fraction()


def test_precision_doubling_tables():
    with precision(120):
        checks_hi, _ = reproduce_tables()
    checks_lo, _ = reproduce_tables()
    for a, b in zip(checks_lo, checks_hi):
        va, vb = Fraction(a.computed), Fraction(b.computed)
        if a.direction == "lower":
            assert vb >= va - Fraction(1, 10 ** 6)
        else:
            assert vb <= va + Fraction(1, 10 ** 6)


def test_reference_integrity():
    assert set(reference.BOUNDS) == set(reference.XS)
    for case in reference.CASES:
        assert set(reference.EPSILON[case]) == set(reference.XS)
        for x in reference.XS:
            assert set(reference.CONSTANTS[case][x]) == set(reference.CONSTANT_FIELDS)


def test_write_tables(tmp_path):
    checks, reports = reproduce_tables()
    paths = write_tables(checks, reports, tmp_path)
    names = {os.path.basename(p) for p in paths}
    assert names == {f"{n}.tsv" for n in reference.TABLE_NAMES}
    with open(os.path.join(tmp_path, "bounds.tsv")) as fp:
        assert len(fp.read().strip().splitlines()) == 1 + 18
