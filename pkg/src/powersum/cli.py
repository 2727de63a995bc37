"""Command line: powersum {compute,bounds,sieve,search,tables,prove}."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import List, Optional

from . import orchestrator as orch
from .sieve import SieveConfig

log = logging.getLogger("powersum")

# keys a --config JSON file may preset (flag dest names)
CONFIG_KEYS = {
    "json", "precision", "checkpoint", "max_primes", "max_modulus", "n_ceiling",
    "k_max", "n_max", "checkpoint_every", "workers", "small_y_k", "outdir",
}


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _range(text: str):
    lo, sep, hi = text.partition("..")
    try:
        a, b = int(lo), int(hi if sep else lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A or A..B, got {text!r}")
    if a > b:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return a, b


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=None, help="print the JSON run report")
    common.add_argument("--precision", type=_positive, help="working precision in decimal digits (default 60)")
    common.add_argument("--checkpoint", metavar="DIR", help="checkpoint directory for sieve runs")
    common.add_argument("--max-primes", type=_positive)
    common.add_argument("--max-modulus", type=_positive)
    common.add_argument("--checkpoint-every", type=_positive)
    common.add_argument("--n-ceiling", type=_positive)
    common.add_argument("--k-max", type=_positive)
    common.add_argument("--workers", type=_positive)
    common.add_argument("--config", metavar="FILE", help="JSON file presetting any of these flags")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="powersum", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", parents=[common], help="T_k(x), S_k(x), factors, perfect powers")
    c.add_argument("x", type=_positive)
    c.add_argument("k", type=_positive)
    c.add_argument("--n-max", type=_positive)
    c.add_argument("--max-digits", type=_positive, default=100_000)

    b = sub.add_parser("bounds", parents=[common], help="bounds on n (or k) for one x")
    b.add_argument("x", type=int)
    b.add_argument("k", type=_positive, nargs="?")

    s = sub.add_parser("sieve", parents=[common], help="modular sieve for fixed (x, n)")
    s.add_argument("x", type=int)
    s.add_argument("n", type=int)

    q = sub.add_parser("search", parents=[common], help="direct perfect-power search")
    q.add_argument("x", type=_range, help="x or lo..hi")
    q.add_argument("--n-max", type=_positive)
    q.add_argument("--n-min", type=_positive, default=3)

    t = sub.add_parser("tables", parents=[common], help="recompute and diff the bound tables")
    t.add_argument("--outdir", help="write one TSV file per table here")
    t.add_argument("--derive", action="store_true", help="also bisect for the smallest certifiable bounds")

    r = sub.add_parser("prove", parents=[common], help="run the desk-scale proof for one x")
    r.add_argument("x", type=int)
    r.add_argument("--small-y-k", type=int, help="k ceiling for the y <= 10^6 branch")
    r.add_argument("--full-scale", action="store_true", help="use the full certified ranges")
    return p


def _apply_config(args: argparse.Namespace) -> None:
    if not args.config:
        return
    try:
        with open(args.config) as fp:
            preset = json.load(fp)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}")
    unknown = set(preset) - CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for key, value in preset.items():
        if getattr(args, key, None) is None:  # flags win over the file
            setattr(args, key, value)


def _sieve_config(args) -> SieveConfig:
    kw = {}
    for name in ("max_primes", "max_modulus", "checkpoint_every"):
        v = getattr(args, name, None)
        if v is not None:
            kw[name] = int(v)
    return SieveConfig(**kw)


def _opt(args, name, default):
    v = getattr(args, name, None)
    return default if v is None else v


def dispatch(args) -> orch.RunReport:
    digits = _opt(args, "precision", 60)
    workers = _opt(args, "workers", 1)
    if args.command == "compute":
        return orch.cmd_compute(args.x, args.k, _opt(args, "n_max", 12), args.max_digits)
    if args.command == "bounds":
        if args.x < 2:
            raise UsageError("x must be at least 2")
        return orch.cmd_bounds(args.x, args.k, digits)
    if args.command == "sieve":
        if not 2 <= args.x <= 13 or args.n < 3:
            raise UsageError("need 2 <= x <= 13 and n >= 3")
        return orch.cmd_sieve(args.x, args.n, _sieve_config(args), args.checkpoint, workers)
    if args.command == "search":
        lo, hi = args.x
        n_max = _opt(args, "n_max", 12)
        if not 2 <= args.n_min <= n_max:
            raise UsageError("need 2 <= n-min <= n-max")
        return orch.cmd_search(lo, hi, _opt(args, "k_max", orch.SEARCH_K), n_max, args.n_min)
    if args.command == "tables":
        return orch.cmd_tables(_opt(args, "outdir", None), digits, args.derive)
    if args.command == "prove":
        if not 2 <= args.x <= 13:
            raise UsageError("x must lie in [2, 13]")
        return orch.cmd_prove(
            args.x,
            n_ceiling=_opt(args, "n_ceiling", orch.DESK_N_CEILING),
            small_y_k=_opt(args, "small_y_k", orch.DESK_SMALL_Y_K),
            config=_sieve_config(args),
            ckpt_dir=args.checkpoint,
            full_scale=args.full_scale,
            workers=workers,
            digits=digits,
        )
    raise UsageError(f"unknown command {args.command}")


def render_text(rep: orch.RunReport) -> str:
    lines = [f"== {rep.command} {json.dumps(rep.inputs, sort_keys=True, default=str)}"]
    if rep.command == "compute":
        for name in ("T", "S"):
            o = rep.outputs[name]
            val = o["value"] if o["digits"] <= 80 else f"{o['value'][:40]}...({o['digits']} digits)"
            lines.append(f"{name} = {val}")
            lines.append(f"  factors: {o['factors']}")
            wit = ", ".join(f"{b}^{e}" for b, e in o["witnesses"]) or "none"
            lines.append(f"  perfect powers: {wit}")
    elif rep.command == "bounds" and "bounds" in rep.outputs:
        lines.append("case  bound      RHS(bound+1)   certified")
        for r in rep.outputs["bounds"]:
            lines.append(f"{r['case']:<5} {r['bound']:<10} {r['rhs_at_bound_plus_1']:<14} {r['certified']}")
    elif rep.command == "bounds":
        for o in rep.outputs["outcomes"]:
            nm = f"({o['n_max']})" if o["n_max"] else ""
            lines.append(f"k={o['k']:<3} {o['kind']}{nm}  [{o['label']}]")
    elif rep.command == "search":
        lines.append(f"grid: {rep.outputs['grid_size']} values of T_k(x)")
        for w in rep.outputs["witnesses"]:
            flag = "" if w["in_scope"] else "  (out of scope)"
            lines.append(f"T_{w['k']}({w['x']}) = {w['y']}^{w['n']}{flag}")
        if not rep.outputs["witnesses"]:
            lines.append("no witnesses")
    elif rep.command == "tables":
        for name, ok in rep.outputs["matrix"].items():
            lines.append(f"{name:<12} {'PASS' if ok else 'FAIL'}")
        for f in rep.outputs.get("files", []):
            lines.append(f"wrote {f}")
    else:
        if "plan" in rep.outputs:
            plan = rep.outputs["plan"]
            lines.append(f"plan: n in {plan['n_list'][:12]}{'...' if len(plan['n_list']) > 12 else ''}; {plan['provenance']}")
        for v in rep.verdicts:
            lines.append("  " + ", ".join(f"{k}={v[k]}" for k in v if k not in ("classes", "open")))
    lines.extend(f"note: {n}" for n in rep.notes)
    lines.append(f"verdict: {rep.verdict}")
    return "\n".join(lines)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        _apply_config(args)
        rep = dispatch(args)
    except UsageError as exc:
        print(f"powersum: error: {exc}", file=sys.stderr)
        return orch.EXIT_USAGE
    except ValueError as exc:
        print(f"powersum: error: {exc}", file=sys.stderr)
        return orch.EXIT_USAGE
    except (ArithmeticError, AssertionError) as exc:
        print(f"powersum: invariant violated: {exc}", file=sys.stderr)
        return orch.EXIT_INVARIANT
    print(rep.to_json() if args.json else render_text(rep))
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
