"""Partition parameter tau, its p=1/2 prediction 1/tau, and exact ex*.

tau(F) is the largest t for which some s in 0..t admits no partition of
V(F) into s cliques and t-s independent sets (empty parts allowed).
ex*(n, F) is the largest |E| such that some base edge set E0 disjoint
from E keeps (V, E0 + X) free of induced F for every X inside E.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from .errors import (DegenerateGraphError, FeasibilityError, InputError,
                     ParameterError, SizeLimitError)
from .family import batch_contains, normalize_family
from .hypergraph import RUniformGraph, rank_subset, subsets_colex

TAU_BOUND = 12
EXSTAR_BOUND = 6
WITNESS_EDGE_BOUND = 24
_WITNESS_MASK_BITS = 63


def _adjacency(F: RUniformGraph) -> list:
    adj = [0] * F.n
    for a, b in F.edges():
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    return adj


def _find_partition(adj: list, n: int, s: int, t: int) -> tuple | None:
    """A partition of 0..n-1 into s cliques then t-s independent sets,
    or None.  Backtracking over vertices in order; among empty parts of
    the same kind only the first is tried (they are interchangeable)."""
    kinds = [True] * s + [False] * (t - s)
    parts: list = [[] for _ in range(t)]

    def extend(v: int) -> bool:
        if v == n:
            return True
        tried_empty = {True: False, False: False}
        for idx, members in enumerate(parts):
            kind = kinds[idx]
            if not members:
                if tried_empty[kind]:
                    continue
                tried_empty[kind] = True
                fits = True
            elif kind:
                fits = all(adj[v] >> u & 1 for u in members)
            else:
                fits = all(not (adj[v] >> u & 1) for u in members)
            if fits:
                members.append(v)
                if extend(v + 1):
                    return True
                members.pop()
        return False

    if n == 0:
        return tuple(() for _ in range(t))
    return tuple(tuple(ms) for ms in parts) if extend(0) else None


def check_partition(F: RUniformGraph, parts, s: int) -> bool:
    """True iff parts is a partition of V(F) whose first s parts are
    cliques and the rest independent sets."""
    flat = [v for part in parts for v in part]
    if sorted(flat) != list(range(F.n)):
        return False
    adj = _adjacency(F)
    for idx, part in enumerate(parts):
        for a, b in combinations(part, 2):
            if bool(adj[a] >> b & 1) != (idx < s):
                return False
    return True


@dataclass(frozen=True)
class TauResult:
    """t with a non-partitionable s, plus level-(t+1) partition
    witnesses for every s proving t is maximal."""

    t: int
    witness_s: int
    refutations: tuple  # refutations[s]: partition into s cliques + rest


def tau(F: RUniformGraph) -> TauResult:
    """Exact tau by descending levels from |V(F)| (all s satisfiable)."""
    if F.r != 2:
        raise ParameterError(f"tau is defined for r=2 graphs, got r={F.r}")
    if F.n > TAU_BOUND:
        raise SizeLimitError(f"tau backtracking bound is {TAU_BOUND} vertices")
    if F.n == 0:
        raise DegenerateGraphError("tau undefined on the empty vertex set")
    adj = _adjacency(F)
    above = tuple(_find_partition(adj, F.n, s, F.n) for s in range(F.n + 1))
    if any(p is None for p in above):
        raise DegenerateGraphError("level |V| must admit every s")
    for t in range(F.n - 1, 0, -1):
        found = [_find_partition(adj, F.n, s, t) for s in range(t + 1)]
        missing = [s for s, p in enumerate(found) if p is None]
        if missing:
            return TauResult(t=t, witness_s=missing[0], refutations=above)
        above = tuple(found)
    # every positive level is partitionable for all s; level 0 cannot
    # absorb a nonempty vertex set, which is the degenerate t=0 signal
    return TauResult(t=0, witness_s=0, refutations=above)


def predicted_c_half(F: RUniformGraph) -> Fraction:
    """The p=1/2 entropy prediction 1/tau(F)."""
    result = tau(F)
    if result.t == 0:
        raise DegenerateGraphError(
            f"tau({F.n}-vertex graph) = 0; prediction 1/tau undefined")
    return Fraction(1, result.t)


def _edge_bits(edges, n: int) -> list:
    out = []
    for e in edges:
        pair = tuple(sorted(e))
        if len(pair) != 2 or pair[0] == pair[1] or pair[0] < 0 or pair[1] >= n:
            raise InputError(f"{e} is not an edge on 0..{n - 1}")
        out.append((pair, rank_subset(pair, 2)))
    if len({b for _, b in out}) != len(out):
        raise InputError("duplicate edges")
    return out


@dataclass(frozen=True)
class WitnessResult:
    ok: bool
    counterexample: tuple | None  # an X inside E whose graph induces F


def witness_check(n: int, F: RUniformGraph, E, E0) -> WitnessResult:
    """Exhaustively test every X inside E: (V, E0 + X) has no induced F."""
    if F.r != 2:
        raise ParameterError(f"witness_check is for r=2 graphs, got r={F.r}")
    if comb(n, 2) > _WITNESS_MASK_BITS:
        raise FeasibilityError(
            f"edge masks need C(n,2) <= {_WITNESS_MASK_BITS} bits")
    e_bits = _edge_bits(E, n)
    e0_bits = _edge_bits(E0, n)
    if {b for _, b in e_bits} & {b for _, b in e0_bits}:
        raise InputError("E and E0 must be disjoint")
    if len(e_bits) > WITNESS_EDGE_BOUND:
        raise FeasibilityError(
            f"|E| = {len(e_bits)} exceeds the 2^{WITNESS_EDGE_BOUND} bound")
    fam = normalize_family([F])
    base = np.uint64(sum(1 << b for _, b in e0_bits))
    k = len(e_bits)
    split = min(k, 20)
    lows = np.zeros(1, dtype=np.uint64)
    for _, b in e_bits[:split]:
        lows = np.concatenate([lows, lows | np.uint64(1 << b)])
    for high_sel in range(1 << (k - split)):
        high = sum(1 << e_bits[split + j][1]
                   for j in range(k - split) if high_sel >> j & 1)
        masks = lows | np.uint64(base | np.uint64(high))
        hit = batch_contains(masks, n, 2, fam)
        if hit.any():
            idx = int(np.argmax(hit))
            chosen = [e_bits[j][0] for j in range(split) if idx >> j & 1]
            chosen += [e_bits[split + j][0] for j in range(k - split)
                       if high_sel >> j & 1]
            return WitnessResult(ok=False, counterexample=tuple(sorted(chosen)))
    return WitnessResult(ok=True, counterexample=None)


@dataclass(frozen=True)
class ExStarResult:
    n: int
    value: int
    edges: tuple       # E, the maximized set
    base_edges: tuple  # E0, disjoint base making every X inside E safe


def _free_table(n: int, F: RUniformGraph) -> np.ndarray:
    """free[mask]: the graph with that edge mask has no induced F."""
    fam = normalize_family([F])
    nbits = comb(n, 2)
    masks = np.arange(1 << nbits, dtype=np.uint64)
    return ~batch_contains(masks, n, 2, fam)


def _submasks_ascending(mask: int) -> list:
    subs = [0]
    b = mask
    while b:
        low = b & -b
        subs += [s | low for s in subs]
        b ^= low
    return sorted(subs)


def exstar(n: int, F: RUniformGraph) -> ExStarResult:
    """Exact ex*(n, F) with a witness pair, by descending |E| search.

    Feasibility of E is monotone under shrinking E, so the first
    feasible size is the maximum.  For each E, base candidates E0 are
    prefiltered to F-free masks and then cut down X by X (vectorized);
    ties return the colex-least (E, E0) masks.
    """
    if F.r != 2:
        raise ParameterError(f"exstar is for r=2 graphs, got r={F.r}")
    if n > EXSTAR_BOUND:
        raise FeasibilityError(f"exstar search bound is n <= {EXSTAR_BOUND}")
    if n < 1:
        raise ParameterError("need n >= 1")
    free = _free_table(n, F)
    nbits = comb(n, 2)
    full = (1 << nbits) - 1
    pairs = subsets_colex(n, 2)

    def edges_of(mask: int) -> tuple:
        return tuple(pairs[i] for i in range(nbits) if mask >> i & 1)

    for size in range(nbits, -1, -1):
        for e_mask in _size_masks(nbits, size):
            comp = full ^ e_mask
            cands = np.array([e0 for e0 in _submasks_ascending(comp)
                              if free[e0]], dtype=np.uint64)
            if cands.size == 0:
                continue
            for x in _submasks_ascending(e_mask):
                cands = cands[free[cands | np.uint64(x)]]
                if cands.size == 0:
                    break
            if cands.size:
                return ExStarResult(n=n, value=size, edges=edges_of(e_mask),
                                    base_edges=edges_of(int(cands[0])))
    raise DegenerateGraphError(
        "no edge set is feasible; every graph on n vertices induces F")


def _size_masks(nbits: int, size: int):
    """All nbits-wide masks of given popcount, ascending (Gosper)."""
    if size == 0:
        yield 0
        return
    v = (1 << size) - 1
    limit = 1 << nbits
    while v < limit:
        yield v
        c = v & -v
        r = v + c
        v = (((r ^ v) >> 2) // c) | r


def exstar_to_json_obj(res: ExStarResult) -> dict:
    return {"value": res.value, "E": [list(e) for e in res.edges],
            "E0": [list(e) for e in res.base_edges]}


def tau_to_json_obj(res: TauResult) -> dict:
    return {"t": res.t, "witness_s": res.witness_s,
            "refutations": [[list(part) for part in p]
                            for p in res.refutations]}
