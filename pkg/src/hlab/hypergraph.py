"""r-uniform hypergraphs on labeled vertices as colex-ranked bit vectors.

Bit k of ``edge_mask`` corresponds to the r-subset with colex rank k,
rank({a_1 < ... < a_r}) = sum_i C(a_i, i).  Graphs are immutable values;
every operation here is a pure function.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .errors import (
    DegenerateSubsetError,
    MalformedSubsetError,
    ParameterError,
    SizeLimitError,
)
from .rng import Rng, bernoulli_threshold

# Brute-force canonicalization stays exact only while n! enumeration is
# affordable; these are the documented defaults.
CANONICAL_BOUND_GRAPHS = 10
CANONICAL_BOUND_HYPERGRAPHS = 8


def binom(n: int, k: int) -> int:
    """Exact binomial coefficient (arbitrary precision, never wraps)."""
    if k < 0 or n < 0:
        return 0
    return comb(n, k)


def rank_subset(subset, r: int) -> int:
    """Colex rank of a strictly increasing r-subset."""
    s = tuple(subset)
    if len(s) != r:
        raise MalformedSubsetError(f"expected {r} elements, got {len(s)}")
    prev = -1
    total = 0
    for i, a in enumerate(s, start=1):
        if a <= prev:
            raise MalformedSubsetError(f"subset {s} not strictly increasing")
        prev = a
        total += comb(a, i)
    return total


def unrank_subset(k: int, r: int) -> tuple:
    """Inverse of rank_subset; total on every k >= 0."""
    if k < 0:
        raise MalformedSubsetError("rank must be nonnegative")
    out = []
    for i in range(r, 0, -1):
        a = i - 1
        while comb(a + 1, i) <= k:
            a += 1
        out.append(a)
        k -= comb(a, i)
    return tuple(reversed(out))


@lru_cache(maxsize=None)
def subsets_colex(n: int, r: int) -> tuple:
    """All r-subsets of range(n) in colex order (index = rank)."""
    if r == 0:
        return ((),)
    if r > n:
        return ()
    out = []
    for top in range(r - 1, n):
        out.extend(c + (top,) for c in subsets_colex(top, r - 1))
    return tuple(out)


@lru_cache(maxsize=None)
def _rank_index(n: int, r: int) -> dict:
    return {s: i for i, s in enumerate(subsets_colex(n, r))}


@lru_cache(maxsize=None)
def induced_rank_table(n: int, h: int, r: int) -> np.ndarray:
    """Global-rank layout of induced subgraphs, one row per h-subset.

    Row i (the i-th h-subset D of range(n) in colex order) lists, in
    local colex order, the global ranks of the C(h,r) r-subsets of D.
    Extracting those bits of an edge_mask yields the induced mask on D.
    """
    local = subsets_colex(h, r)
    rows = []
    for d in subsets_colex(n, h):
        rows.append([rank_subset(tuple(d[j] for j in loc), r) for loc in local])
    arr = np.asarray(rows, dtype=np.int64).reshape(len(rows), len(local))
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RUniformGraph:
    """An r-graph on n labeled vertices 0..n-1."""

    n: int
    r: int
    edge_mask: int

    def __post_init__(self):
        if self.r < 1 or self.n < 0:
            raise ParameterError(f"need r >= 1 and n >= 0, got r={self.r}, n={self.n}")
        # n < r is allowed (edgeless: the mask space is empty).
        nbits = comb(self.n, self.r)
        if self.edge_mask < 0 or self.edge_mask >> nbits:
            raise ParameterError(
                f"edge_mask has set bits outside the C({self.n},{self.r}) layout"
            )

    @property
    def num_edges(self) -> int:
        return self.edge_mask.bit_count()

    def edges(self) -> tuple:
        all_subs = subsets_colex(self.n, self.r)
        m = self.edge_mask
        out = []
        while m:
            k = (m & -m).bit_length() - 1
            out.append(all_subs[k])
            m &= m - 1
        return tuple(out)

    def has_edge(self, subset) -> bool:
        return bool(self.edge_mask >> rank_subset(subset, self.r) & 1)


@dataclass(frozen=True)
class CanonicalCode:
    """Minimal edge_mask over all vertex relabelings; equal iff isomorphic."""

    n: int
    r: int
    code: int


def graph_from_edges(n: int, r: int, edges) -> RUniformGraph:
    mask = 0
    for e in edges:
        mask |= 1 << rank_subset(tuple(sorted(e)), r)
    return RUniformGraph(n, r, mask)


def empty_graph(n: int, r: int) -> RUniformGraph:
    return RUniformGraph(n, r, 0)


def complete_graph(n: int, r: int) -> RUniformGraph:
    return RUniformGraph(n, r, (1 << comb(n, r)) - 1)


def induced_subgraph(G: RUniformGraph, vertices) -> RUniformGraph:
    """G[D] with D relabeled 0..|D|-1 in increasing order."""
    d = tuple(sorted(vertices))
    if len(set(d)) != len(d) or (d and (d[0] < 0 or d[-1] >= G.n)):
        raise MalformedSubsetError(f"{vertices} is not a vertex subset of 0..{G.n - 1}")
    if len(d) < G.r:
        raise DegenerateSubsetError(
            f"need at least r={G.r} vertices, got {len(d)}"
        )
    local = subsets_colex(len(d), G.r)
    mask = 0
    for j, loc in enumerate(local):
        k = rank_subset(tuple(d[i] for i in loc), G.r)
        if G.edge_mask >> k & 1:
            mask |= 1 << j
    return RUniformGraph(len(d), G.r, mask)


def permute_graph(G: RUniformGraph, sigma) -> RUniformGraph:
    """Relabel vertices by v -> sigma[v]."""
    sig = tuple(sigma)
    if sorted(sig) != list(range(G.n)):
        raise ParameterError(f"{sigma} is not a permutation of 0..{G.n - 1}")
    idx = _rank_index(G.n, G.r)
    all_subs = subsets_colex(G.n, G.r)
    mask = 0
    m = G.edge_mask
    while m:
        k = (m & -m).bit_length() - 1
        mask |= 1 << idx[tuple(sorted(sig[v] for v in all_subs[k]))]
        m &= m - 1
    return RUniformGraph(G.n, G.r, mask)


def canonical_bound(r: int) -> int:
    return CANONICAL_BOUND_GRAPHS if r == 2 else CANONICAL_BOUND_HYPERGRAPHS


@lru_cache(maxsize=1 << 16)
def _canonical_mask(n: int, r: int, mask: int) -> int:
    idx = _rank_index(n, r)
    all_subs = subsets_colex(n, r)
    edges = []
    m = mask
    while m:
        k = (m & -m).bit_length() - 1
        edges.append(all_subs[k])
        m &= m - 1
    best = mask
    for sig in itertools.permutations(range(n)):
        cur = 0
        for e in edges:
            cur |= 1 << idx[tuple(sorted(sig[v] for v in e))]
            if cur > best:
                break
        else:
            if cur < best:
                best = cur
    return best


def canonical_code(G: RUniformGraph, max_n: int | None = None) -> CanonicalCode:
    """Exact canonical form by permutation minimization (small n only)."""
    bound = canonical_bound(G.r) if max_n is None else max_n
    if G.n > bound:
        raise SizeLimitError(
            f"canonicalization limited to n <= {bound} for r={G.r}, got n={G.n}"
        )
    return CanonicalCode(G.n, G.r, _canonical_mask(G.n, G.r, G.edge_mask))


@lru_cache(maxsize=1 << 14)
def _orbit_masks(n: int, r: int, mask: int) -> frozenset:
    idx = _rank_index(n, r)
    all_subs = subsets_colex(n, r)
    edges = []
    m = mask
    while m:
        k = (m & -m).bit_length() - 1
        edges.append(all_subs[k])
        m &= m - 1
    out = set()
    for sig in itertools.permutations(range(n)):
        cur = 0
        for e in edges:
            cur |= 1 << idx[tuple(sorted(sig[v] for v in e))]
        out.add(cur)
    return frozenset(out)


def orbit_masks(G: RUniformGraph) -> frozenset:
    """All labeled edge_masks isomorphic to G (the relabeling orbit)."""
    bound = canonical_bound(G.r)
    if G.n > bound:
        raise SizeLimitError(
            f"orbit enumeration limited to n <= {bound} for r={G.r}, got n={G.n}"
        )
    return _orbit_masks(G.n, G.r, G.edge_mask)


def random_graph(n: int, r: int, p, rng: Rng) -> RUniformGraph:
    """G(n,p) draw: bit k independently present, consuming rng in rank order."""
    p = Fraction(p)
    threshold = bernoulli_threshold(p)
    nbits = comb(n, r)
    if nbits == 0:
        return RUniformGraph(n, r, 0)
    draws = rng.u64_block(nbits)
    if threshold >= 1 << 64:
        bits = np.ones(nbits, dtype=bool)
    else:
        bits = draws < np.uint64(threshold)
    packed = np.packbits(bits, bitorder="little").tobytes()
    return RUniformGraph(n, r, int.from_bytes(packed, "little"))
