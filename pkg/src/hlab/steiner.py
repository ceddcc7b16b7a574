"""Partial Steiner systems (r,m,n): construction, validation, permutation.

Covered r-subsets live in a byte table indexed by colex rank, giving
O(1) collision checks on the construction hot path.  All constructors
are deterministic functions of (seed, stream, parameters).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .errors import ConstructionError, ParameterError, ParseError
from .hypergraph import induced_rank_table, subsets_colex
from .rng import Rng, bernoulli_threshold

DEFAULT_BITE = Fraction(1, 10)
DEFAULT_ROUNDS = 10


@lru_cache(maxsize=None)
def _block_rank_rows(n: int, m: int, r: int) -> tuple:
    """Row i: global colex ranks of the r-subsets of the i-th m-subset."""
    return tuple(tuple(row) for row in induced_rank_table(n, m, r).tolist())


@dataclass(frozen=True)
class VerifyReport:
    valid: bool
    d: int
    covered: int
    uncovered_fraction: Fraction
    violations: tuple  # r-subsets covered more than once
    structural: tuple = ()  # malformed-block messages


def verify_system(r: int, m: int, n: int, blocks) -> VerifyReport:
    """Check the Steiner property on raw blocks; never raises."""
    blocks = [tuple(b) for b in blocks]
    structural = []
    counts: dict = {}
    for b in blocks:
        if len(b) != m or len(set(b)) != m:
            structural.append(f"block {b} is not an m-set with m={m}")
            continue
        if sorted(b) != list(b) or b[0] < 0 or b[-1] >= n:
            structural.append(f"block {b} not a sorted subset of 0..{n - 1}")
            continue
        for j, loc in enumerate(subsets_colex(m, r)):
            sub = tuple(b[i] for i in loc)
            counts[sub] = counts.get(sub, 0) + 1
    violations = tuple(sorted(s for s, c in counts.items() if c > 1))
    covered = len(counts)
    total = comb(n, r)
    return VerifyReport(
        valid=not violations and not structural,
        d=len(blocks),
        covered=covered,
        uncovered_fraction=Fraction(total - covered, total) if total else Fraction(0),
        violations=violations,
        structural=tuple(structural),
    )


@dataclass(frozen=True)
class SteinerSystem:
    """A validated partial Steiner system; construction rejects invalid."""

    r: int
    m: int
    n: int
    blocks: tuple

    def __post_init__(self):
        if not self.r < self.m <= self.n:
            raise ParameterError(
                f"need r < m <= n, got (r={self.r}, m={self.m}, n={self.n})"
            )
        report = verify_system(self.r, self.m, self.n, self.blocks)
        if not report.valid:
            raise ConstructionError(
                f"not a partial Steiner system: violations={report.violations} "
                f"structural={report.structural}"
            )

    @property
    def d(self) -> int:
        return len(self.blocks)

    @property
    def covered(self) -> int:
        return self.d * comb(self.m, self.r)

    @property
    def uncovered_fraction(self) -> Fraction:
        total = comb(self.n, self.r)
        return Fraction(total - self.covered, total)

    def covered_table(self) -> bytearray:
        table = bytearray(comb(self.n, self.r))
        rows = _block_rank_rows(self.n, self.m, self.r)
        index = {s: i for i, s in enumerate(subsets_colex(self.n, self.m))}
        for b in self.blocks:
            for k in rows[index[b]]:
                table[k] = 1
        return table

    def verify(self) -> VerifyReport:
        return verify_system(self.r, self.m, self.n, self.blocks)


def _greedy_fill(r: int, m: int, n: int, rng: Rng, covered: bytearray,
                 blocks: list) -> list:
    """Scan all m-subsets in seeded-shuffle order, adding every block whose
    r-subsets are all uncovered.  The result is maximal by construction."""
    subs = subsets_colex(n, m)
    rows = _block_rank_rows(n, m, r)
    order = list(range(len(subs)))
    rng.shuffle(order)
    for ci in order:
        row = rows[ci]
        for k in row:
            if covered[k]:
                break
        else:
            for k in row:
                covered[k] = 1
            blocks.append(subs[ci])
    return blocks


def _check_params(r: int, m: int, n: int) -> None:
    if not r < m <= n:
        raise ParameterError(f"need r < m <= n, got (r={r}, m={m}, n={n})")
    if r < 1:
        raise ParameterError("need r >= 1")


def greedy_system(r: int, m: int, n: int, seed: int, stream: int = 0) -> SteinerSystem:
    """Random-order greedy packing; maximal, deterministic in (seed, stream)."""
    _check_params(r, m, n)
    rng = Rng(seed, stream)
    covered = bytearray(comb(n, r))
    blocks = _greedy_fill(r, m, n, rng, covered, [])
    return SteinerSystem(r=r, m=m, n=n, blocks=tuple(sorted(blocks)))


def nibble_system(r: int, m: int, n: int, seed: int,
                  bite=DEFAULT_BITE, rounds: int = DEFAULT_ROUNDS,
                  stream: int = 0) -> SteinerSystem:
    """Iterated random bites, then greedy completion to maximality.

    Each round draws one Bernoulli(bite) per m-subset (in colex order);
    sampled candidates are kept when their r-subsets are uncovered and
    do not collide with a candidate kept earlier in the same round.
    With rounds=0 this is exactly greedy_system at the same seed.
    """
    _check_params(r, m, n)
    bite = Fraction(bite)
    if not 0 < bite < 1:
        raise ParameterError(f"bite must lie in (0, 1), got {bite}")
    if rounds < 0:
        raise ParameterError("rounds must be >= 0")
    rng = Rng(seed, stream)
    threshold = np.uint64(bernoulli_threshold(bite))
    subs = subsets_colex(n, m)
    rows = _block_rank_rows(n, m, r)
    covered = bytearray(comb(n, r))
    blocks: list = []
    for _ in range(rounds):
        draws = rng.u64_block(len(subs))
        sampled = np.nonzero(draws < threshold)[0]
        round_marks: set = set()
        for ci in sampled:
            row = rows[ci]
            if any(covered[k] for k in row) or any(k in round_marks for k in row):
                continue
            round_marks.update(row)
            blocks.append(subs[ci])
        for k in round_marks:
            covered[k] = 1
    _greedy_fill(r, m, n, rng, covered, blocks)
    return SteinerSystem(r=r, m=m, n=n, blocks=tuple(sorted(blocks)))


def permute_system(sys: SteinerSystem, sigma) -> SteinerSystem:
    """Relabel vertices by v -> sigma[v]; block count is invariant."""
    sig = tuple(sigma)
    if sorted(sig) != list(range(sys.n)):
        raise ParameterError(f"{sigma} is not a permutation of 0..{sys.n - 1}")
    blocks = tuple(sorted(tuple(sorted(sig[v] for v in b)) for b in sys.blocks))
    return SteinerSystem(r=sys.r, m=sys.m, n=sys.n, blocks=blocks)


@dataclass(frozen=True)
class MaximalityReport:
    maximal: bool | None  # None: sampled search found nothing (no certificate)
    method: str
    checked: int
    addable: tuple | None


def maximality_report(sys: SteinerSystem, exhaustive_limit: int = 2_000_000,
                      samples: int = 20_000, seed: int = 0) -> MaximalityReport:
    """Search for an addable block: exhaustive when C(n,m) is small,
    seeded sampling (certificate only on refutation) above the limit."""
    covered = sys.covered_table()
    rows = _block_rank_rows(sys.n, sys.m, sys.r)
    subs = subsets_colex(sys.n, sys.m)
    total = comb(sys.n, sys.m)
    if total <= exhaustive_limit:
        for ci, row in enumerate(rows):
            if all(not covered[k] for k in row):
                return MaximalityReport(False, "exhaustive", ci + 1, subs[ci])
        return MaximalityReport(True, "exhaustive", total, None)
    rng = Rng(seed)
    for i in range(samples):
        ci = rng.random_below(total)
        if all(not covered[k] for k in rows[ci]):
            return MaximalityReport(False, "sampled", i + 1, subs[ci])
    return MaximalityReport(None, "sampled", samples, None)


def uncovered_ranks(sys: SteinerSystem) -> list:
    table = sys.covered_table()
    return [k for k, hit in enumerate(table) if not hit]


def system_to_json_obj(sys: SteinerSystem) -> dict:
    return {"r": sys.r, "m": sys.m, "n": sys.n,
            "blocks": [list(b) for b in sys.blocks]}


def system_from_json_obj(obj) -> SteinerSystem:
    try:
        return SteinerSystem(
            r=int(obj["r"]), m=int(obj["m"]), n=int(obj["n"]),
            blocks=tuple(sorted(tuple(int(v) for v in b) for b in obj["blocks"])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad system object: {exc}", 0) from None


def load_system(path: str) -> SteinerSystem:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from None
    return system_from_json_obj(obj)


def save_system(sys: SteinerSystem, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(system_to_json_obj(sys)) + "\n")
