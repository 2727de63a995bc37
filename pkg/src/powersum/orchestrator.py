"""Desk-scale reproduction pipeline: plans, commands and run reports.

Each ``cmd_*`` function is pure apart from optional checkpoint files and
returns a RunReport; the argparse layer in ``cli`` only formats them.
"""
from __future__ import annotations

import enum
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .baker import reference
from .baker.bounds import certify_bound, reproduce_tables, reports_json, write_tables
from .baker.directed import precision
from .exact import perfect_power_witnesses, power_sum_S, power_sum_T, primes_up_to
from .sieve import (
    SieveConfig,
    Status,
    checkpoint_load,
    reduce_exponent,
    run_sieve,
    small_prime_exponent_cap,
)
from .valuation import BoundKind, exponent_bound

BAKER_XS = reference.XS  # 2, 3, 6, 7, 10, 11
VALUATION_XS = (4, 5, 8, 9, 12, 13)
SEARCH_K = 83  # direct search covers k <= 83 for every n
DESK_N_CEILING = 50
DESK_SMALL_Y_K = 300  # default k ceiling for the y <= 10^6 branch
SMALL_Y = 10**6


class Verdict(str, enum.Enum):
    PROVEN = "Proven"
    TRUNCATED = "Truncated"  # everything executed is proven; ranges were cut
    UNDECIDED = "Undecided"
    INFEASIBLE = "Infeasible"  # plan emitted, not executed
    DONE = "Done"  # informational commands


class Strategy(str, enum.Enum):
    SIEVE_ONLY = "SieveOnly"
    BOUND_THEN_SIEVE = "BoundThenSieve"


EXIT_OK, EXIT_UNDECIDED, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2, 3


@dataclass
class RunReport:
    command: str
    inputs: dict
    outputs: dict = field(default_factory=dict)
    verdicts: List[dict] = field(default_factory=list)
    checkpoints: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    verdict: str = Verdict.PROVEN.value

    @property
    def exit_code(self) -> int:
        ok = (Verdict.PROVEN, Verdict.TRUNCATED, Verdict.DONE)
        return EXIT_OK if self.verdict in ok else EXIT_UNDECIDED

    def to_json(self, with_timings: bool = True) -> str:
        d = asdict(self)
        if not with_timings:
            d.pop("timings")
        return json.dumps(d, indent=2, sort_keys=True, default=str)


# -- compute -----------------------------------------------------------------


def factor_digest(m: int, limit: int = 10**4) -> Tuple[List[Tuple[int, int]], int]:
    """Trial division by primes <= limit: ([(p, e)], unfactored cofactor)."""
    out = []
    for p in primes_up_to(limit):
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        if m == 1:
            break
    return out, m


def _fmt_factors(fs, cofactor) -> str:
    parts = [f"{p}^{e}" if e > 1 else str(p) for p, e in fs]
    if cofactor > 1:
        parts.append(f"C{len(str(cofactor))}")
    return " * ".join(parts) or "1"


def cmd_compute(x: int, k: int, n_max: int = 12, max_digits: int = 100_000) -> RunReport:
    if x < 1 or k < 1:
        raise ValueError("x and k must be positive")
    est = k * math.log10(2 * x) + 1
    if est > max_digits:
        raise ValueError(f"T_k(x) would have about {est:.0f} digits (limit {max_digits})")
    rep = RunReport("compute", {"x": x, "k": k, "n_max": n_max}, verdict=Verdict.DONE.value)
    t0 = time.perf_counter()
    t, s = power_sum_T(k, x, verify=True), power_sum_S(k, x, verify=True)
    for name, value in (("T", t), ("S", s)):
        fs, cof = factor_digest(value)
        rep.outputs[name] = {
            "value": str(value),
            "digits": len(str(value)),
            "factors": _fmt_factors(fs, cof),
            "witnesses": [[str(b), e] for b, e in perfect_power_witnesses(value, 2, n_max)],
        }
    rep.timings["compute"] = time.perf_counter() - t0
    return rep


# -- bounds ------------------------------------------------------------------


def theorem_ceiling(x: int, k_classes: int = 8) -> Tuple[int, List[dict]]:
    """Largest n allowed by the 2-adic valuation over all k (0 if none).

    The 2-adic closed form depends on k only through k = 1, 2, 3, even k
    >= 4 and odd k >= 5, so k <= 8 covers every exponent.
    """
    rows, ceiling = [], 0
    for k in range(1, k_classes + 1):
        out = exponent_bound(x, k)
        if out.kind is BoundKind.NOT_COVERED or not out.case_label.startswith("v2T"):
            raise ValueError(f"x={x}: no 2-adic bound for k={k}")
        rows.append({"k": k, "outcome": str(out)})
        if out.kind is BoundKind.UPPER_BOUND:
            ceiling = max(ceiling, out.n_max)
    return ceiling, rows


def cmd_bounds(x: int, k: Optional[int] = None, digits: int = 60) -> RunReport:
    rep = RunReport("bounds", {"x": x, "k": k, "precision": digits})
    t0 = time.perf_counter()
    if x in BAKER_XS:
        with precision(digits):
            rows = [certify_bound(x, case).row() for case in reference.CASES]
        rep.outputs["bounds"] = rows
        for r in rows:
            rep.verdicts.append({"x": x, "case": r["case"], "bound": r["bound"], "certified": r["certified"]})
        if not all(r["certified"] for r in rows):
            rep.verdict = Verdict.UNDECIDED.value
    else:
        ks = [k] if k is not None else list(range(1, 9))
        outcomes = []
        for kk in ks:
            out = exponent_bound(x, kk)
            outcomes.append({"k": kk, "kind": out.kind.value, "n_max": out.n_max, "label": out.case_label})
            if out.kind is BoundKind.NOT_COVERED:
                rep.verdict = Verdict.UNDECIDED.value
        rep.outputs["outcomes"] = outcomes
    rep.timings["bounds"] = time.perf_counter() - t0
    return rep


# -- sieve -------------------------------------------------------------------


def _ckpt_file(directory: str, x: int, n: int) -> str:
    return os.path.join(directory, f"sieve-x{x}-n{n}.json")


def _sieve_job(args) -> dict:
    x, n, config, ckpt_dir = args
    state = None
    path = None
    if ckpt_dir:
        path = _ckpt_file(ckpt_dir, x, n)
        if os.path.exists(path):
            state = checkpoint_load(path)
        config = replace(config, checkpoint_path=path)
    t0 = time.perf_counter()
    final = run_sieve(x, n, config, state=state)
    out = final.summary()
    out["resumed_from"] = len(state.primes_used) if state is not None else None
    out["checkpoint"] = path
    out["seconds"] = time.perf_counter() - t0
    return out


def run_sieve_jobs(jobs: Sequence[Tuple[int, int]], config: SieveConfig, ckpt_dir: Optional[str],
                   workers: int = 1) -> List[dict]:
    """Run independent (x, n) sieves; results sorted by (x, n)."""
    args = [(x, n, config, ckpt_dir) for x, n in sorted(set(jobs))]
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_sieve_job, args))
    else:
        results = [_sieve_job(a) for a in args]
    return sorted(results, key=lambda r: (r["x"], r["n"]))


def _sieve_entry(r: dict) -> dict:
    return {k: r[k] for k in ("x", "n", "status", "modulus", "primes_used", "last_prime", "reason")}


def cmd_sieve(x: int, n: int, config: SieveConfig = SieveConfig(), ckpt_dir: Optional[str] = None,
              workers: int = 1) -> RunReport:
    if not 2 <= x <= 13:
        raise ValueError("x must lie in [2, 13]")
    exps = reduce_exponent(n)
    rep = RunReport("sieve", {"x": x, "n": n, "reduced": exps, "config": _config_dict(config)})
    t0 = time.perf_counter()
    results = run_sieve_jobs([(x, e) for e in exps], config, ckpt_dir, workers)
    # one proven reduced exponent already excludes n
    proven = any(r["status"] == Status.PROVEN.value for r in results)
    rep.verdicts = [_sieve_entry(r) for r in results]
    rep.checkpoints = [r["checkpoint"] for r in results if r["checkpoint"]]
    rep.verdict = (Verdict.PROVEN if proven else Verdict.UNDECIDED).value
    rep.timings["sieve"] = time.perf_counter() - t0
    return rep


def _config_dict(config: SieveConfig) -> dict:
    d = asdict(config)
    d["max_modulus"] = str(d["max_modulus"])
    return d


# -- search ------------------------------------------------------------------


def cmd_search(x_lo: int, x_hi: int, k_max: int = SEARCH_K, n_max: int = 12, n_min: int = 3) -> RunReport:
    rep = RunReport("search", {"x": [x_lo, x_hi], "k_max": k_max, "n": [n_min, n_max]})
    t0 = time.perf_counter()
    witnesses = []
    for x in range(x_lo, x_hi + 1):
        for k in range(1, k_max + 1):
            for b, e in perfect_power_witnesses(power_sum_T(k, x), n_min, n_max):
                witnesses.append({"x": x, "k": k, "y": str(b), "n": e, "in_scope": x >= 2 and e >= 3})
    rep.outputs["witnesses"] = witnesses
    rep.outputs["grid_size"] = (x_hi - x_lo + 1) * k_max
    if any(not w["in_scope"] for w in witnesses):
        rep.notes.append("witnesses with x = 1 or n = 2 lie outside the theorem's scope")
    if any(w["in_scope"] for w in witnesses):
        rep.verdict = Verdict.UNDECIDED.value
    rep.timings["search"] = time.perf_counter() - t0
    return rep


# -- tables ------------------------------------------------------------------


def cmd_tables(outdir: Optional[str] = None, digits: int = 60, derive: bool = False) -> RunReport:
    rep = RunReport("tables", {"precision": digits, "derive": derive})
    t0 = time.perf_counter()
    with precision(digits):
        checks, reports = reproduce_tables(derive=derive)
    rep.outputs["entries"] = [asdict(c) for c in checks]
    rep.outputs["bounds"] = json.loads(reports_json(reports))
    rep.outputs["offset_identity"] = offset_identity_rows()
    failed = [c for c in checks if not c.ok] + [r for r in reports if not r.reproduced]
    rep.outputs["matrix"] = {
        name: all(c.ok for c in checks if c.table == name) for name in reference.TABLE_NAMES if name != "bounds"
    }
    rep.outputs["matrix"]["bounds"] = all(r.reproduced for r in reports)
    loose = [f"{c.table} x={c.x} {c.field}: {c.published} vs {c.computed}" for c in checks if not c.close]
    if loose:
        rep.notes.append("sound but more than 5 printed units away: " + "; ".join(loose))
    if outdir:
        rep.outputs["files"] = write_tables(checks, reports, outdir)
    if failed:
        rep.verdict = Verdict.UNDECIDED.value
    rep.timings["tables"] = time.perf_counter() - t0
    return rep


def offset_identity_rows() -> List[dict]:
    """Published h' offsets against published eps + lambda/sigma."""
    from fractions import Fraction

    from .baker.bounds import case_setup
    from .baker.laurent import sigma_lambda

    rows = []
    for case in reference.CASES:
        for x in reference.XS:
            setup = case_setup(x, case)
            sig, lam = sigma_lambda(setup.rho, setup.mu)
            implied = Fraction(reference.EPSILON[case][x]) + (lam.hi / sig.lo).to_fraction()
            printed = Fraction(reference.CONSTANTS[case][x]["hprime_offset"])
            diff = printed - implied
            rows.append({
                "case": case, "x": x, "printed": str(float(printed)),
                "eps_plus_lambda_over_sigma": f"{float(implied):.6f}",
                "difference": f"{float(diff):.6f}",
                "within_rounding": abs(diff) <= Fraction(1, 2 * 10**4) + Fraction(1, 10**4),
            })
    return rows


# -- prove -------------------------------------------------------------------


@dataclass
class ProofPlan:
    x: int
    n_list: List[int]
    strategy: Dict[int, str]
    provenance: str
    n_bound: int  # certified bound on n
    n_ceiling: int  # executed range
    search_k: int
    small_y_k_bound: int = 0
    small_y_k_ceiling: int = 0
    truncated: bool = False
    feasible: bool = True
    instructions: List[str] = field(default_factory=list)


def _sieve_exponents(lo: int, hi: int) -> List[int]:
    out = set()
    for n in range(lo, hi + 1):
        out.update(reduce_exponent(n))
    return sorted(out)


def small_y_k_bound(x: int) -> int:
    """k bound when y <= 10^6: max(k1, 6 n0 log 10 / log 2x)."""
    n0, _, k1 = reference.BOUNDS[x]
    return max(k1, math.floor(6 * n0 * math.log(10) / math.log(2 * x)))


def make_plan(x: int, n_ceiling: int = DESK_N_CEILING, small_y_k: int = DESK_SMALL_Y_K,
              full_scale: bool = False, desk_n_limit: int = 1000, desk_k_limit: int = 5000) -> ProofPlan:
    if not 2 <= x <= 13:
        raise ValueError("x must lie in [2, 13]")
    if x in VALUATION_XS:
        ceiling, _ = theorem_ceiling(x)
        ns = _sieve_exponents(3, ceiling)
        return ProofPlan(
            x=x, n_list=ns, strategy={n: Strategy.SIEVE_ONLY.value for n in ns},
            provenance=f"2-adic valuation bound: n <= {max(ceiling, 2)} for every k",
            n_bound=ceiling, n_ceiling=ceiling, search_k=0,
        )
    _, n1, _ = reference.BOUNDS[x]
    kb = small_y_k_bound(x)
    if full_scale:
        n_ceiling, small_y_k = n1, kb
    top = min(n_ceiling, n1)
    ns = _sieve_exponents(3, top)
    plan = ProofPlan(
        x=x, n_list=ns, strategy={n: Strategy.BOUND_THEN_SIEVE.value for n in ns},
        provenance=f"linear forms in logarithms: n <= {n1} for y > 10^6 (certified)",
        n_bound=n1, n_ceiling=top, search_k=SEARCH_K,
        small_y_k_bound=kb, small_y_k_ceiling=min(small_y_k, kb),
    )
    plan.truncated = top < n1 or plan.small_y_k_ceiling < kb
    if full_scale and (n1 > desk_n_limit or kb > desk_k_limit):
        plan.feasible = False
        plan.instructions = [
            f"sieve every reduced exponent in 3..{n1} with a checkpoint directory, e.g. "
            f"`powersum sieve {x} <n> --checkpoint ckpt/` (reruns resume from ckpt/sieve-x{x}-n<n>.json)",
            f"run the y <= 10^6 branch for 84 <= k <= {kb} with `powersum prove {x} --small-y-k {kb}`",
        ]
    return plan


def small_y_check(x: int, k_lo: int, k_hi: int, prime_limit: int = SMALL_Y) -> List[dict]:
    """Exclude y <= 10^6 for k in [k_lo, k_hi]: every prime of y divides
    T_k(x), so the smallest prime p | T_k(x) gives n <= v_p(T_k(x)); if
    that prime exceeds 10^6 there is nothing to do, else the few
    remaining n are checked exactly. Returns rows that were NOT excluded."""
    bad = []
    for k in range(k_lo, k_hi + 1):
        cap = small_prime_exponent_cap(x, k, prime_limit)
        if cap is None:
            continue
        _, v = cap
        if v >= 3 and perfect_power_witnesses(power_sum_T(k, x), 3, v):
            bad.append({"x": x, "k": k, "cap": list(cap)})
    return bad


def cmd_prove(x: int, n_ceiling: int = DESK_N_CEILING, small_y_k: int = DESK_SMALL_Y_K,
              config: SieveConfig = SieveConfig(), ckpt_dir: Optional[str] = None,
              full_scale: bool = False, workers: int = 1, digits: int = 60) -> RunReport:
    plan = make_plan(x, n_ceiling, small_y_k, full_scale)
    rep = RunReport("prove", {"x": x, "n_ceiling": n_ceiling, "small_y_k": small_y_k,
                              "full_scale": full_scale, "config": _config_dict(config)})
    rep.outputs["plan"] = asdict(plan)
    if not plan.feasible:
        rep.verdict = Verdict.INFEASIBLE.value
        rep.notes.append("full-scale run is beyond desk scale; plan emitted, nothing executed")
        rep.notes.extend(plan.instructions)
        return rep
    undecided = False
    t0 = time.perf_counter()
    if x in BAKER_XS:
        # n up to 4096 exceeds the bit length of every T_k(x) searched
        hits = cmd_search(x, x, plan.search_k, 4096).outputs["witnesses"]
        in_scope = [w for w in hits if w["n"] >= 3]
        rep.verdicts.append({"component": "direct search", "x": x, "k": f"1..{plan.search_k}",
                             "status": "Proven" if not in_scope else "Undecided"})
        undecided |= bool(in_scope)
        with precision(digits):
            certified = [certify_bound(x, case).reproduced for case in reference.CASES]
        rep.verdicts.append({"component": "bounds", "x": x, "certified": certified,
                             "status": "Proven" if all(certified) else "Undecided"})
        undecided |= not all(certified)
        lo = plan.search_k + 1
        bad = small_y_check(x, lo, plan.small_y_k_ceiling) if plan.small_y_k_ceiling >= lo else []
        rep.verdicts.append({"component": "y <= 10^6", "x": x, "k": f"{lo}..{plan.small_y_k_ceiling}",
                             "k_bound": plan.small_y_k_bound,
                             "status": "Proven" if not bad else "Undecided", "open": bad})
        undecided |= bool(bad)
        rep.timings["bounds_and_search"] = time.perf_counter() - t0
    else:
        _, rows = theorem_ceiling(x)
        rep.verdicts.append({"component": "valuation bound", "x": x, "n_max": plan.n_bound,
                             "classes": rows, "status": "Proven"})
    t1 = time.perf_counter()
    results = run_sieve_jobs([(x, n) for n in plan.n_list], config, ckpt_dir, workers)
    for r in results:
        rep.verdicts.append({"component": "sieve", **_sieve_entry(r), "resumed_from": r["resumed_from"]})
        if r["checkpoint"]:
            rep.checkpoints.append(r["checkpoint"])
    undecided |= any(r["status"] != Status.PROVEN.value for r in results)
    rep.timings["sieve"] = time.perf_counter() - t1
    if undecided:
        rep.verdict = Verdict.UNDECIDED.value
    elif plan.truncated:
        rep.verdict = Verdict.TRUNCATED.value
        rep.notes.append(
            f"TRUNCATED: sieve ran for n <= {plan.n_ceiling} of n <= {plan.n_bound}; "
            f"y <= 10^6 branch ran for k <= {plan.small_y_k_ceiling} of k <= {plan.small_y_k_bound}"
        )
    return rep
