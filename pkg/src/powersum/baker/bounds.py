"""Bounds for n (y > 4x^2, y > 10^6) and for k (y <= 4x^2) when
x in {2, 3, 6, 7, 10, 11}, certified with directed rounding.

For each case the heights a1, a2 and the parameter h are fixed as
functions of x and of the main variable v (n in cases I and II, k in case
III). With everything evaluated at the published bound B, the linear-form
upper bound and Laurent's lower bound combine to v < RHS(v). A bound B is
certified when RHS(B+1) < B+1 and RHS(v)/v is decreasing on v >= B+1.

Worst-case substitutions:
  * b2 <= v/2, so h = log v + eps with eps independent of v;
  * y at the infimum of its range (4x^2 or 10^6); a1/log y, and with it
    every y-dependent term of the right-hand side, decreases in y, and C0
    decreases in a1;
  * constants computed at v = B stay valid for every v > B because H grows
    with v while omega, theta, C0, C, C' shrink.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from ..valuation import predict_v2_T
from . import reference
from .directed import DOWN, UP, DirectedReal, Enclosure, log, log_exact, sqrt
from .laurent import LaurentConstants, laurent_constants, sigma_lambda

MU = Fraction(57, 100)
LOG_SLACK = Fraction(181, 100)  # 1.75 + 0.06 with D = 1


@dataclass(frozen=True)
class CaseSetup:
    x: int
    case: str
    rho: Fraction
    mu: Fraction
    a1: Enclosure
    a2: Enclosure
    y_floor: Optional[int]  # infimum of y (cases I, II); None in case III

    @property
    def main_variable(self) -> str:
        return "k" if self.case == "III" else "n"


def _check_x_case(x: int, case: str) -> None:
    if x not in reference.XS:
        raise ValueError(f"x must be one of {reference.XS}")
    if case not in reference.CASES:
        raise ValueError(f"case must be one of {reference.CASES}")


def case_setup(x: int, case: str) -> CaseSetup:
    _check_x_case(x, case)
    if case == "I":
        rho, y = Fraction(77, 10), 4 * x * x
    elif case == "II":
        rho, y = (Fraction(96, 10) if x in (2, 3, 6, 7) else Fraction(93, 10)), 10**6
    else:
        rho, y = Fraction(62, 10), None

    def log2x(r):
        return log_exact(2 * x, r)

    if y is not None:
        a2 = Enclosure.of(lambda r: (rho + 1) * log2x(r))
        a1 = Enclosure.of(lambda r: (rho + 1) / 2 * log2x(r) + 2 * log_exact(y, r))
    else:
        a1 = Enclosure.of(lambda r: Fraction(102, 100) * (rho + 3) * log2x(r))
        a2 = Enclosure.of(lambda r: 2 * (rho + 1) * log2x(r))
    return CaseSetup(x, case, rho, MU, a1, a2, y)


def epsilon_upper(setup: CaseSetup) -> DirectedReal:
    """Upper bound for log(1/a2 + 1/(2 a1)) + log(lambda) + 1.81."""
    _, lam = sigma_lambda(setup.rho, setup.mu)
    inner = 1 / setup.a2.lo + 1 / (2 * setup.a1.lo)
    return log(inner) + log(lam.hi) + LOG_SLACK


def h_parameter(x: int, case: str, main_variable: int):
    """Return (h, eps): h encloses the chosen h = max(log v + eps, lambda,
    log(2)/2) and eps = h - log v is the recovered additive constant."""
    setup = case_setup(x, case)
    if main_variable < 2:
        raise ValueError("main variable must be at least 2")
    eps = epsilon_upper(setup)
    _, lam = sigma_lambda(setup.rho, setup.mu)
    logv = Enclosure.of(lambda r: log_exact(main_variable, r))
    h = Enclosure(logv.lo + eps.retag(DOWN), logv.hi + eps)
    floor = max(lam.hi.value, (log_exact(2, UP) / 2).value)
    if h.lo.value < floor:
        # the first term of the max is not the largest; h is a chosen constant
        h_val = lam.hi if lam.hi.value >= floor else log_exact(2, UP) / 2
        h = Enclosure(h_val.retag(DOWN), h_val)
        eps = h.hi - logv.lo
    return h, eps


def hprime_offset(setup: CaseSetup) -> DirectedReal:
    """Upper bound for the constant c in h' = log v + c."""
    sig, lam = sigma_lambda(setup.rho, setup.mu)
    return epsilon_upper(setup) + lam.hi / sig.lo


def constants_at(setup: CaseSetup, v: int) -> LaurentConstants:
    h, _ = h_parameter(setup.x, setup.case, v)
    return laurent_constants(setup.rho, setup.mu, setup.a1, setup.a2, h)


def _hprime_at(setup: CaseSetup, v: int) -> Enclosure:
    c = hprime_offset(setup)
    return Enclosure(log_exact(v, DOWN) + c.retag(DOWN), log_exact(v, UP) + c)


def _log_term_arg(setup: CaseSetup, consts: LaurentConstants, hp: DirectedReal) -> DirectedReal:
    factor = 2 if setup.case == "III" else 1
    return factor * consts.Cprime * hp * hp * setup.a1.hi * setup.a2.hi


def _numerator(setup: CaseSetup, consts: LaurentConstants, v: int) -> DirectedReal:
    hp = _hprime_at(setup, v).hi
    a1a2 = setup.a1.hi * setup.a2.hi
    num = consts.C * hp * hp * a1a2 + sqrt(consts.omega * consts.theta) * hp
    num = num + log(_log_term_arg(setup, consts, hp))
    if setup.case != "III":
        num = num + log_exact(4, UP)
    return num


def _log_ratio_lower(x: int) -> DirectedReal:
    return log_exact(Fraction(2 * x, 2 * x - 1), DOWN)


def contradiction_rhs(setup: CaseSetup, consts: LaurentConstants, n: int) -> DirectedReal:
    """Upper bound for the right-hand side of n < RHS(n), cases I and II."""
    if setup.case == "III":
        raise ValueError("use contradiction_rhs_k for case III")
    if n < 3:
        raise ValueError("n must be at least 3")
    x = setup.x
    scale = log_exact(2 * x, UP) / _log_ratio_lower(x)
    return _numerator(setup, consts, n) / log_exact(setup.y_floor, DOWN) * scale


def contradiction_rhs_k(setup: CaseSetup, consts: LaurentConstants, k: int) -> DirectedReal:
    """Upper bound for the right-hand side of k < RHS(k), case III."""
    if setup.case != "III":
        raise ValueError("contradiction_rhs_k is for case III")
    if k < 83:
        raise ValueError("k must be at least 83")
    return _numerator(setup, consts, k) / _log_ratio_lower(setup.x)


def rhs(setup: CaseSetup, consts: LaurentConstants, v: int) -> DirectedReal:
    if setup.case == "III":
        return contradiction_rhs_k(setup, consts, v)
    return contradiction_rhs(setup, consts, v)


def y_is_odd(x: int) -> bool:
    """T_k(x) odd for every k >= 1, hence y odd; the 2-adic predictor is
    constant on k = 1, even k >= 4, odd k >= 5, so k <= 5 covers all k."""
    preds = [predict_v2_T(x, k) for k in range(1, 6)]
    return all(p.covered and p.value == 0 for p in preds)


@dataclass
class BoundReport:
    x: int
    case: str
    rho: Fraction
    mu: Fraction
    epsilon: DirectedReal
    hprime_offset: DirectedReal
    constants: LaurentConstants
    published_bound: int
    rhs_at_next: DirectedReal
    derived_bound: Optional[int] = None
    checks: Dict[str, bool] = field(default_factory=dict)
    first_violation: Optional[int] = None

    @property
    def reproduced(self) -> bool:
        return all(self.checks.values())

    def row(self) -> dict:
        c = self.constants
        return {
            "x": self.x,
            "case": self.case,
            "rho": str(self.rho),
            "mu": str(self.mu),
            "epsilon": self.epsilon.decimal_str(6),
            "H": c.H.decimal_str(6),
            "omega": c.omega.decimal_str(6),
            "theta": c.theta.decimal_str(6),
            "C0": c.C0.decimal_str(6),
            "C": c.C.decimal_str(6),
            "Cprime": c.Cprime.decimal_str(6),
            "hprime_offset": self.hprime_offset.decimal_str(6),
            "bound": self.published_bound,
            "rhs_at_bound_plus_1": self.rhs_at_next.decimal_str(3),
            "derived_bound": self.derived_bound,
            "certified": self.reproduced,
            "checks": dict(self.checks),
        }


def _certify_at(setup: CaseSetup, bound: int):
    consts = constants_at(setup, bound)
    v = bound + 1
    value = rhs(setup, consts, v)
    hp_lo = _hprime_at(setup, v).lo
    x = setup.x
    # the upper constants are the numbers used in the inequality, so they
    # are exact here; only h' needs its lower end
    factor = 2 if setup.case == "III" else 1
    k_lo = factor * consts.Cprime.retag(DOWN) * setup.a1.hi.retag(DOWN) * setup.a2.hi.retag(DOWN)
    checks = {
        "rhs_below_next": value < v,
        # each term of RHS(v)/v decreases for v >= B+1
        "hprime_above_2": hp_lo > 2,
        "log_term_above_1": log(k_lo * hp_lo * hp_lo) > 1,
    }
    if setup.case == "III":
        checks["k_at_least_83"] = bound >= 83
    else:
        # r = 0 forces n < (log 2x + log 2) / log(2x/(2x-1)), below the bound
        r0 = (log_exact(2 * x, UP) + log_exact(2, UP)) / _log_ratio_lower(x)
        checks["r_nonzero"] = r0 < bound
    # the proof needs multiplicatively independent alpha_1, alpha_2 via odd y
    checks["y_odd"] = y_is_odd(x)
    return consts, value, checks


def certify_bound(x: int, case: str, bound: Optional[int] = None, derive: bool = False) -> BoundReport:
    """Certify the published bound (or ``bound``) for (x, case)."""
    setup = case_setup(x, case)
    target = reference.bound_for(x, case) if bound is None else bound
    consts, value, checks = _certify_at(setup, target)
    report = BoundReport(
        x=x,
        case=case,
        rho=setup.rho,
        mu=setup.mu,
        epsilon=epsilon_upper(setup),
        hprime_offset=hprime_offset(setup),
        constants=consts,
        published_bound=target,
        rhs_at_next=value,
        checks=checks,
    )
    if not checks["rhs_below_next"]:
        report.first_violation = target + 1
    if derive:
        report.derived_bound = derive_bound(x, case, hi=target if report.reproduced else None)
    return report


def derive_bound(x: int, case: str, hi: Optional[int] = None) -> Optional[int]:
    """Smallest bound certified by the same argument (bisection)."""
    setup = case_setup(x, case)
    lo = 83

    def ok(b: int) -> bool:
        try:
            _, _, checks = _certify_at(setup, b)
        except ValueError:
            return False
        return all(checks.values())

    if hi is None:
        hi = reference.bound_for(x, case)
        while not ok(hi):
            hi *= 2
            if hi > 10**12:
                return None
    if ok(lo):
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


# -- table reproduction ------------------------------------------------------

SLACK = Fraction(5, 10**5)


@dataclass(frozen=True)
class TableCheck:
    table: str
    x: int
    field: str
    published: str
    computed: str
    direction: str  # "lower" or "upper"
    sound: bool  # published value is a valid bound given the computed one
    close: bool  # diagnostic only: within 5 units of the last printed digit

    @property
    def ok(self) -> bool:
        return self.sound


def _compare(table, x, name, published: str, value: DirectedReal, lower: bool) -> TableCheck:
    pub = Fraction(published)
    unit = Fraction(1, 10 ** reference.decimals(published))
    val = value.to_fraction()
    if lower:
        sound = val >= pub
    else:
        sound = val <= pub + SLACK
    close = abs(val - pub) <= 5 * unit
    places = reference.decimals(published) + 2
    return TableCheck(
        table, x, name, published, value.decimal_str(places), "lower" if lower else "upper", sound, close
    )


def reproduce_tables(derive: bool = False) -> tuple:
    """Recompute every published table entry.

    Returns (checks, reports): the per-entry TableCheck list and the
    BoundReport for every (x, case).
    """
    checks: List[TableCheck] = []
    reports: List[BoundReport] = []
    for case in reference.CASES:
        for x in reference.XS:
            rep = certify_bound(x, case, derive=derive)
            reports.append(rep)
            checks.append(
                _compare(f"eps_{case}", x, "epsilon", reference.EPSILON[case][x], rep.epsilon, False)
            )
            published = reference.CONSTANTS[case][x]
            c = rep.constants
            values = {
                "H": c.H,
                "omega": c.omega,
                "theta": c.theta,
                "C0": c.C0,
                "C": c.C,
                "Cprime": c.Cprime,
                "hprime_offset": rep.hprime_offset,
            }
            for name in reference.CONSTANT_FIELDS:
                checks.append(
                    _compare(
                        f"laurent_{case}", x, name, published[name], values[name],
                        name in reference.LOWER_FIELDS,
                    )
                )
    return checks, reports


def write_tables(checks: List[TableCheck], reports: List[BoundReport], outdir) -> List[str]:
    """One tab-separated file per table; returns the written paths."""
    import os

    os.makedirs(outdir, exist_ok=True)
    paths = []
    by_table: Dict[str, List[TableCheck]] = {}
    for c in checks:
        by_table.setdefault(c.table, []).append(c)
    path = os.path.join(outdir, "bounds.tsv")
    with open(path, "w") as fp:
        fp.write("x\tcase\tbound\trhs_at_bound_plus_1\tderived_bound\tcertified\n")
        for r in reports:
            fp.write(
                f"{r.x}\t{r.case}\t{r.published_bound}\t{r.rhs_at_next.decimal_str(3)}\t"
                f"{r.derived_bound if r.derived_bound is not None else ''}\t{r.reproduced}\n"
            )
    paths.append(path)
    for name, rows in by_table.items():
        path = os.path.join(outdir, f"{name}.tsv")
        with open(path, "w") as fp:
            fp.write("x\tfield\tpublished\tcomputed\tdirection\tsound\tclose\n")
            for c in rows:
                fp.write(
                    f"{c.x}\t{c.field}\t{c.published}\t{c.computed}\t{c.direction}\t{c.sound}\t{c.close}\n"
                )
        paths.append(path)
    return paths


def reports_json(reports: List[BoundReport]) -> str:
    return json.dumps([r.row() for r in reports], indent=2, sort_keys=True)
