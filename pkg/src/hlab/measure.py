"""Exact and Monte-Carlo measures of graph classes in G(n,p).

mu_k(C) = Pr[G(k,p) in C].  The exact path enumerates every edge_mask,
histograms satisfying masks by edge count, and evaluates
sum_e count_e * p^e * (1-p)^(N-e) in exact rational arithmetic; p is a
rational input throughout.  Entropy constants c_n = -log2(mu_n)/C(n,r)
are computed in 96-bit mpmath arithmetic (round-to-nearest), well above
the 50-bit contract.

Enumeration is chunked on a fixed grid of at most 2^20 masks; worker
count only schedules chunks, so results are bit-identical for any
worker count.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import comb

import mpmath
import numpy as np
from concurrent.futures import ThreadPoolExecutor
from scipy.stats import beta as _beta

from .codec import graph_from_json_obj, graph_to_json_obj
from .errors import FeasibilityError, ParameterError, ParseError
from .family import (ForbiddenFamily, batch_contains, contains_induced,
                     normalize_family)
from .hypergraph import RUniformGraph, induced_subgraph
from .rng import bernoulli_threshold, substream_blocks

DEFAULT_EXACT_CAP_BITS = 24
HARD_EXACT_CAP_BITS = 30
EXACT_CAP_ENV = "HLAB_EXACT_CAP"
_BLOCK_BITS = 20
_LOG_PREC_BITS = 96


@dataclass(frozen=True)
class EdgePredicate:
    """Pure boolean function of an r-graph on a fixed (n, r) space."""

    kind: str
    k: int | None = None
    family: ForbiddenFamily | None = None
    masks: frozenset | None = None
    parts: tuple = ()
    inner: "EdgePredicate | None" = None
    within: tuple | None = None

    @staticmethod
    def forb(fam: ForbiddenFamily) -> "EdgePredicate":
        return EdgePredicate(kind="forb", family=fam)

    @staticmethod
    def contains(fam: ForbiddenFamily, within=None) -> "EdgePredicate":
        """Some member induced in G, or in G[within] when within is given."""
        scope = tuple(sorted(within)) if within is not None else None
        return EdgePredicate(kind="contains", family=fam, within=scope)

    @staticmethod
    def min_edges(k: int) -> "EdgePredicate":
        return EdgePredicate(kind="min_edges", k=k)

    @staticmethod
    def max_edges(k: int) -> "EdgePredicate":
        return EdgePredicate(kind="max_edges", k=k)

    @staticmethod
    def explicit(masks) -> "EdgePredicate":
        return EdgePredicate(kind="explicit", masks=frozenset(int(m) for m in masks))

    @staticmethod
    def intersection(parts) -> "EdgePredicate":
        return EdgePredicate(kind="intersection", parts=tuple(parts))

    @staticmethod
    def complement(inner: "EdgePredicate") -> "EdgePredicate":
        return EdgePredicate(kind="complement", inner=inner)

    @staticmethod
    def always_true() -> "EdgePredicate":
        return EdgePredicate(kind="min_edges", k=0)

    def evaluate(self, G: RUniformGraph) -> bool:
        if self.kind == "min_edges":
            return G.num_edges >= self.k
        if self.kind == "max_edges":
            return G.num_edges <= self.k
        if self.kind == "explicit":
            return G.edge_mask in self.masks
        if self.kind == "forb":
            return not contains_induced(G, self.family)
        if self.kind == "contains":
            if self.within is not None:
                return contains_induced(induced_subgraph(G, self.within),
                                        self.family)
            return contains_induced(G, self.family)
        if self.kind == "intersection":
            return all(p.evaluate(G) for p in self.parts)
        if self.kind == "complement":
            return not self.inner.evaluate(G)
        raise ParameterError(f"unknown predicate kind {self.kind!r}")

    def batch(self, masks: np.ndarray, n: int, r: int) -> np.ndarray:
        if self.kind == "min_edges":
            return np.bitwise_count(masks) >= self.k
        if self.kind == "max_edges":
            return np.bitwise_count(masks) <= self.k
        if self.kind == "explicit":
            wanted = np.fromiter(sorted(self.masks), count=len(self.masks), dtype=np.uint64)
            return np.isin(masks, wanted)
        if self.kind == "forb":
            return ~batch_contains(masks, n, r, self.family)
        if self.kind == "contains":
            return batch_contains(masks, n, r, self.family, within=self.within)
        if self.kind == "intersection":
            if not self.parts:
                return np.ones(masks.shape, dtype=bool)
            return reduce(np.logical_and, (p.batch(masks, n, r) for p in self.parts))
        if self.kind == "complement":
            return ~self.inner.batch(masks, n, r)
        raise ParameterError(f"unknown predicate kind {self.kind!r}")


@dataclass(frozen=True)
class MeasureResult:
    """A value of mu with method metadata; exact results carry no CI."""

    value: object  # Fraction (exact) or float (montecarlo point estimate)
    method: str
    log2_value: object
    samples: int | None = None
    seed: int | None = None
    hits: int | None = None
    ci_level: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None


@dataclass(frozen=True)
class EntropyPoint:
    n: int
    measure: MeasureResult
    c_n: object  # mpmath.mpf


def exact_cap_bits(override: int | None = None) -> int:
    """Resolve the mask-space cap: explicit override, env var, default."""
    cap = override
    if cap is None:
        env = os.environ.get(EXACT_CAP_ENV)
        cap = int(env) if env else DEFAULT_EXACT_CAP_BITS
    if cap > HARD_EXACT_CAP_BITS:
        raise ParameterError(
            f"exact cap {cap} exceeds hard cap {HARD_EXACT_CAP_BITS} bits"
        )
    return cap


def check_exact_feasible(n: int, r: int, cap_bits: int | None = None) -> int:
    nbits = comb(n, r)
    cap = exact_cap_bits(cap_bits)
    if nbits > cap:
        raise FeasibilityError(
            f"mask space 2^{nbits} for (n={n}, r={r}) exceeds the exact cap "
            f"2^{cap}; fall back to mc_measure for a sampled estimate"
        )
    return nbits


def _validate_p(p) -> Fraction:
    p = Fraction(p)
    if p < 0 or p > 1:
        raise ParameterError(f"edge probability {p} outside [0, 1]")
    return p


def mask_chunks(nbits: int):
    """Fixed chunk grid over the 2^nbits mask space (worker-independent)."""
    step = 1 << min(_BLOCK_BITS, nbits)
    total = 1 << nbits
    return [(start, min(start + step, total)) for start in range(0, total, step)]


def map_chunks(fn, chunks, workers: int = 1) -> list:
    """Apply fn over chunks, preserving chunk order in the result list."""
    if workers <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))


def _edge_histogram(pred, n: int, r: int, nbits: int, workers: int) -> list:
    def one(chunk):
        start, end = chunk
        masks = np.arange(start, end, dtype=np.uint64)
        sat = pred.batch(masks, n, r)
        pops = np.bitwise_count(masks[sat])
        return np.bincount(pops, minlength=nbits + 1)

    hist = [0] * (nbits + 1)
    for part in map_chunks(one, mask_chunks(nbits), workers):
        for e, c in enumerate(part):
            hist[e] += int(c)
    return hist


def weight_powers(p: Fraction, nbits: int) -> tuple:
    """(p^e)_e and ((1-p)^e)_e as exact rationals."""
    q = 1 - p
    pe, qe = [Fraction(1)], [Fraction(1)]
    for _ in range(nbits):
        pe.append(pe[-1] * p)
        qe.append(qe[-1] * q)
    return pe, qe


def value_from_histogram(hist, p: Fraction, nbits: int) -> Fraction:
    pe, qe = weight_powers(p, nbits)
    return sum((hist[e] * pe[e] * qe[nbits - e] for e in range(nbits + 1)),
               Fraction(0))


def log2_fraction(x: Fraction):
    if x == 0:
        return mpmath.mpf("-inf")
    with mpmath.workprec(_LOG_PREC_BITS):
        return mpmath.log(mpmath.mpf(x.numerator), 2) - mpmath.log(
            mpmath.mpf(x.denominator), 2
        )


def exact_measure(n: int, r: int, p, pred, cap_bits: int | None = None,
                  workers: int = 1) -> MeasureResult:
    """Exact mu_n(pred) by full mask enumeration; deterministic."""
    p = _validate_p(p)
    nbits = check_exact_feasible(n, r, cap_bits)
    hist = _edge_histogram(pred, n, r, nbits, workers)
    value = value_from_histogram(hist, p, nbits)
    return MeasureResult(value=value, method="exact", log2_value=log2_fraction(value))


def satisfying_count(n: int, r: int, pred, cap_bits: int | None = None,
                     workers: int = 1) -> int:
    """Number of satisfying masks (the p=1/2 numerator), via the histogram."""
    nbits = check_exact_feasible(n, r, cap_bits)
    return sum(_edge_histogram(pred, n, r, nbits, workers))


def sample_masks(n: int, r: int, p, seed: int, count: int,
                 first_stream: int = 0) -> np.ndarray:
    """Masks of `count` G(n,p) draws; sample i uses substream first_stream+i.

    Identical to random_graph(n, r, p, Rng(seed, stream=first_stream+i))
    for each i, so results never depend on how batches are partitioned.
    """
    p = _validate_p(p)
    nbits = comb(n, r)
    threshold = bernoulli_threshold(p)
    out = np.zeros(count, dtype=np.uint64)
    if nbits == 0 or count == 0:
        return out
    if nbits > 63:
        raise FeasibilityError(
            f"vectorized sampling limited to C(n,r) <= 63 bits, got {nbits}"
        )
    if threshold >= 1 << 64:
        return np.full(count, (1 << nbits) - 1, dtype=np.uint64)
    draws = substream_blocks(seed, first_stream, count, nbits)
    bits = (draws < np.uint64(threshold)).astype(np.uint64)
    shifts = np.arange(nbits, dtype=np.uint64)
    return (bits << shifts[None, :]).sum(axis=1, dtype=np.uint64)


def clopper_pearson(hits: int, samples: int, level: float) -> tuple:
    """Exact binomial CI; conservative coverage >= level."""
    alpha = 1.0 - level
    lo = 0.0 if hits == 0 else float(_beta.ppf(alpha / 2, hits, samples - hits + 1))
    hi = 1.0 if hits == samples else float(
        _beta.ppf(1 - alpha / 2, hits + 1, samples - hits)
    )
    return lo, hi


def mc_measure(n: int, r: int, p, pred, samples: int, seed: int,
               ci_level: float = 0.95, workers: int = 1) -> MeasureResult:
    """Monte-Carlo mu_n(pred) with a Clopper-Pearson interval."""
    p = _validate_p(p)
    if samples < 1:
        raise ParameterError("samples must be >= 1")
    if not 0 < ci_level < 1:
        raise ParameterError("ci_level must be in (0, 1)")
    step = 1 << 16
    chunks = [(i, min(i + step, samples)) for i in range(0, samples, step)]

    def one(chunk):
        lo, hi = chunk
        masks = sample_masks(n, r, p, seed, hi - lo, first_stream=lo)
        return int(pred.batch(masks, n, r).sum())

    hits = sum(map_chunks(one, chunks, workers))
    est = hits / samples
    lo, hi = clopper_pearson(hits, samples, ci_level)
    log2v = mpmath.mpf("-inf") if est == 0 else mpmath.mpf(float(np.log2(est)))
    return MeasureResult(value=est, method="montecarlo", log2_value=log2v,
                         samples=samples, seed=seed, hits=hits,
                         ci_level=ci_level, ci_low=lo, ci_high=hi)


def cn_from_measure(n: int, r: int, mu: Fraction):
    nbits = comb(n, r)
    if nbits < 1:
        raise ParameterError(f"c_n undefined for C({n},{r}) = 0")
    if mu <= 0:
        raise ParameterError("c_n undefined for zero measure")
    with mpmath.workprec(_LOG_PREC_BITS):
        return -log2_fraction(mu) / nbits


def cn_sequence(fam: ForbiddenFamily, p, n_list, cap_bits: int | None = None,
                workers: int = 1) -> list:
    """Entropy points c_n = -log2(mu_n(Forb(fam)))/C(n,r), exact input only."""
    pred = EdgePredicate.forb(fam)
    out = []
    for n in n_list:
        res = exact_measure(n, fam.r, p, pred, cap_bits=cap_bits, workers=workers)
        out.append(EntropyPoint(n=n, measure=res,
                                c_n=cn_from_measure(n, fam.r, res.value)))
    return out


def fraction_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def family_to_json_obj(fam: ForbiddenFamily) -> list:
    return [graph_to_json_obj(g) for g in fam.members]


def family_from_json_obj(obj) -> ForbiddenFamily:
    return normalize_family([graph_from_json_obj(g) for g in obj])


def predicate_to_json_obj(pred: EdgePredicate) -> dict:
    if pred.kind in ("min_edges", "max_edges"):
        return {"kind": pred.kind, "k": pred.k}
    if pred.kind == "explicit":
        return {"kind": "explicit", "masks": sorted(pred.masks)}
    if pred.kind == "forb":
        return {"kind": "forb", "family": family_to_json_obj(pred.family)}
    if pred.kind == "contains":
        obj = {"kind": "contains", "family": family_to_json_obj(pred.family)}
        if pred.within is not None:
            obj["within"] = list(pred.within)
        return obj
    if pred.kind == "intersection":
        return {"kind": "intersection",
                "parts": [predicate_to_json_obj(q) for q in pred.parts]}
    if pred.kind == "complement":
        return {"kind": "complement", "inner": predicate_to_json_obj(pred.inner)}
    raise ParameterError(f"unknown predicate kind {pred.kind!r}")


def predicate_from_json_obj(obj) -> EdgePredicate:
    try:
        kind = obj["kind"]
        if kind == "min_edges":
            return EdgePredicate.min_edges(int(obj["k"]))
        if kind == "max_edges":
            return EdgePredicate.max_edges(int(obj["k"]))
        if kind == "explicit":
            return EdgePredicate.explicit(int(m) for m in obj["masks"])
        if kind == "forb":
            return EdgePredicate.forb(family_from_json_obj(obj["family"]))
        if kind == "contains":
            within = obj.get("within")
            return EdgePredicate.contains(
                family_from_json_obj(obj["family"]),
                within=tuple(int(v) for v in within) if within is not None else None,
            )
        if kind == "intersection":
            return EdgePredicate.intersection(
                predicate_from_json_obj(q) for q in obj["parts"])
        if kind == "complement":
            return EdgePredicate.complement(predicate_from_json_obj(obj["inner"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad predicate object: {exc}", 0) from None
    raise ParseError(f"unknown predicate kind {kind!r}", 0)
