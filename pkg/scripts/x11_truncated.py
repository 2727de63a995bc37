#!/usr/bin/env python3
"""Truncated x = 11 run: direct search, certified bounds, the y <= 10^6
branch up to --small-y-k and the sieve for n <= --n-ceiling. The first
pass is deliberately cut short (--interrupt-after primes per exponent) and
then resumed from the checkpoint directory."""
import argparse
import sys

from powersum import orchestrator as orch
from powersum.cli import render_text
from powersum.sieve import SieveConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-ceiling", type=int, default=31)
    ap.add_argument("--small-y-k", type=int, default=orch.DESK_SMALL_Y_K)
    ap.add_argument("--checkpoint", default="results/ckpt-x11")
    ap.add_argument("--interrupt-after", type=int, default=2)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    first = orch.cmd_prove(11, args.n_ceiling, args.small_y_k,
                           config=SieveConfig(max_primes=args.interrupt_after), ckpt_dir=args.checkpoint)
    print(f"first pass stopped early: verdict {first.verdict}, {len(first.checkpoints)} checkpoints")
    rep = orch.cmd_prove(11, args.n_ceiling, args.small_y_k, ckpt_dir=args.checkpoint)
    print(rep.to_json() if args.json else render_text(rep))
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
