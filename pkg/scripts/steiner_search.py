"""Seed sweep for large partial Steiner packings at fixed (r, m, n).

Reports the block-count distribution over the sweep, the trivial upper
bound C(n,r)/C(m,r), and the best system found; optionally saves it.

Example:
    python3 scripts/steiner_search.py --r 2 --m 3 --n 7 --seeds 10000
"""

import argparse
import sys
import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from hlab.steiner import (greedy_system, maximality_report, nibble_system,
                          save_system)


@dataclass(frozen=True)
class SweepConfig:
    r: int
    m: int
    n: int
    seeds: int
    first_seed: int
    algo: str
    bite: Fraction
    rounds: int
    out: str | None


def parse_args(argv) -> SweepConfig:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r", type=int, required=True)
    ap.add_argument("--m", type=int, required=True)
    ap.add_argument("--n", type=int, required=True)
    ap.add_argument("--seeds", type=int, default=1000)
    ap.add_argument("--first-seed", type=int, default=0)
    ap.add_argument("--algo", choices=("greedy", "nibble"), default="greedy")
    ap.add_argument("--bite", type=Fraction, default=Fraction(1, 10))
    ap.add_argument("--rounds", type=int, default=10)
    ap.add_argument("--out", default=None, help="save the best system here")
    a = ap.parse_args(argv)
    return SweepConfig(r=a.r, m=a.m, n=a.n, seeds=a.seeds,
                       first_seed=a.first_seed, algo=a.algo, bite=a.bite,
                       rounds=a.rounds, out=a.out)


def build(cfg: SweepConfig, seed: int):
    if cfg.algo == "greedy":
        return greedy_system(cfg.r, cfg.m, cfg.n, seed=seed)
    return nibble_system(cfg.r, cfg.m, cfg.n, seed=seed, bite=cfg.bite,
                         rounds=cfg.rounds)


def main(argv=None) -> int:
    cfg = parse_args(argv)
    bound = comb(cfg.n, cfg.r) // comb(cfg.m, cfg.r)
    started = time.perf_counter()
    sizes: Counter = Counter()
    best = None
    for seed in range(cfg.first_seed, cfg.first_seed + cfg.seeds):
        sys_ = build(cfg, seed)
        sizes[sys_.d] += 1
        if best is None or sys_.d > best[1].d:
            best = (seed, sys_)
    elapsed = time.perf_counter() - started
    seed, system = best
    print(f"({cfg.r},{cfg.m},{cfg.n}) {cfg.algo}, {cfg.seeds} seeds, "
          f"{elapsed:.1f}s; upper bound d <= {bound}")
    for d in sorted(sizes):
        share = sizes[d] / cfg.seeds
        print(f"  d = {d:>4}: {sizes[d]:>6} runs ({share:.1%})")
    rep = maximality_report(system)
    print(f"best: d = {system.d} at seed {seed}, uncovered fraction "
          f"{system.uncovered_fraction}, maximal = {rep.maximal} "
          f"({rep.method})")
    if cfg.out:
        save_system(system, cfg.out)
        print(f"saved to {cfg.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
