"""Print the entropy sequence c_n for a forbidden family over an n range.

Example:
    python3 scripts/cn_table.py --family fixtures/famK3.g6 --p 1/2 --n 2 8
"""

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from hlab.family import normalize_family
from hlab.codec import load_graph_list
from hlab.measure import cn_sequence, fraction_str


@dataclass(frozen=True)
class TableConfig:
    family_path: str
    p: Fraction
    n_lo: int
    n_hi: int
    workers: int
    cap_bits: int | None


def parse_args(argv) -> TableConfig:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", required=True,
                    help="family file (graph6 lines or JSON array)")
    ap.add_argument("--p", type=Fraction, default=Fraction(1, 2))
    ap.add_argument("--n", nargs=2, type=int, metavar=("LO", "HI"),
                    default=(2, 7))
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--cap", type=int, default=None)
    a = ap.parse_args(argv)
    return TableConfig(family_path=a.family, p=a.p, n_lo=a.n[0], n_hi=a.n[1],
                       workers=a.workers, cap_bits=a.cap)


def main(argv=None) -> int:
    cfg = parse_args(argv)
    fam = normalize_family(load_graph_list(cfg.family_path))
    points = cn_sequence(fam, cfg.p, range(cfg.n_lo, cfg.n_hi + 1),
                         cap_bits=cfg.cap_bits, workers=cfg.workers)
    print(f"family: {len(fam.members)} member(s), r={fam.r}, t={fam.t}, "
          f"p={fraction_str(cfg.p)}")
    print(f"{'n':>3} {'C(n,r)':>7} {'mu_n':>24} {'c_n':>20} {'delta':>12}")
    prev = None
    for pt in points:
        delta = "" if prev is None else f"{float(pt.c_n - prev):+.6f}"
        print(f"{pt.n:>3} {comb(pt.n, fam.r):>7} "
              f"{fraction_str(pt.measure.value):>24} {float(pt.c_n):>20.12f} "
              f"{delta:>12}")
        prev = pt.c_n
    return 0


if __name__ == "__main__":
    sys.exit(main())
