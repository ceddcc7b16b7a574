"""Exact verification of the partition-lemma and counting pipeline.

Given a class A (as an edge predicate), a forbidden family, and a
partial Steiner system with blocks D_1..D_d, this module computes the
per-block measures theta_i, the threshold index set I, the partition of
A by containment pattern S, the projection and tail bounds, the set X
of dense m-subsets, and the final counting floor.  All quantities are
exact rationals from full mask enumeration; every identity the
arguments rely on is recomputed through two separate code paths and
compared for exact equality.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, floor

import numpy as np

from .errors import (ConstructionError, FeasibilityError, ParameterError,
                     ParseError)
from .family import ForbiddenFamily, count_induced, family_orbit_lookup
from .hypergraph import RUniformGraph, induced_rank_table, subsets_colex
from .measure import (EdgePredicate, MeasureResult, check_exact_feasible,
                      exact_measure, family_from_json_obj, family_to_json_obj,
                      fraction_str, map_chunks, mask_chunks,
                      predicate_from_json_obj, predicate_to_json_obj,
                      value_from_histogram, weight_powers)
from .steiner import SteinerSystem, system_from_json_obj, system_to_json_obj

MAX_PARTITION_BLOCKS = 20


@dataclass(frozen=True)
class LemmaParameters:
    """Knobs of the partition lemma; gamma defaults to nu/4.

    lam is the demanded uncovered fraction of the underlying system;
    epsilon and epsilon_prime are the slack constants of the
    surrounding argument.  All are carried for reporting; only nu,
    gamma, and m enter the computations here.
    """

    nu: Fraction
    gamma: Fraction | None = None
    epsilon: Fraction | None = None
    epsilon_prime: Fraction | None = None
    lam: Fraction | None = None
    m: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "nu", Fraction(self.nu))
        gamma = self.nu / 4 if self.gamma is None else Fraction(self.gamma)
        object.__setattr__(self, "gamma", gamma)
        for name in ("epsilon", "epsilon_prime", "lam"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, Fraction(v))
        for name in ("nu", "gamma", "epsilon", "epsilon_prime", "lam"):
            v = getattr(self, name)
            if v is not None and not 0 < v < 1:
                raise ParameterError(f"{name} must lie in (0, 1), got {v}")
        if self.m is not None and self.m < 2:
            raise ParameterError(f"block order m must be >= 2, got {self.m}")


def _check_block(block, n: int) -> tuple:
    block = tuple(sorted(block))
    if len(set(block)) != len(block) or (block and (block[0] < 0 or block[-1] >= n)):
        raise ParameterError(f"block {block} is not a subset of 0..{n - 1}")
    return block


def block_theta(A: EdgePredicate, block, fam: ForbiddenFamily, n: int, p,
                cap_bits: int | None = None, workers: int = 1) -> Fraction:
    """theta_i: measure of {G in A : some member induced inside block}."""
    block = _check_block(block, n)
    pred = EdgePredicate.intersection(
        (A, EdgePredicate.contains(fam, within=block)))
    return exact_measure(n, fam.r, p, pred, cap_bits=cap_bits,
                         workers=workers).value


def _containment_columns(masks: np.ndarray, n: int, fam: ForbiddenFamily,
                         dsets) -> np.ndarray:
    """Row i: boolean vector of 'some member induced inside dsets[i]'.

    Subset hits are computed once per h-subset and shared across all
    dsets containing it, which is what makes whole-space X scans cheap.
    """
    cols = np.zeros((len(dsets), masks.shape[0]), dtype=bool)
    one = np.uint64(1)
    for h in fam.orders():
        lookup = family_orbit_lookup(fam, h)
        table = induced_rank_table(n, h, fam.r)
        sub_index = {s: i for i, s in enumerate(subsets_colex(n, h))}
        hits: dict = {}
        for di, dset in enumerate(dsets):
            if h > len(dset):
                continue
            for sub in combinations(dset, h):
                row = sub_index[sub]
                if row not in hits:
                    im = np.zeros(masks.shape, dtype=np.uint64)
                    for j, pos in enumerate(table[row]):
                        im |= ((masks >> np.uint64(pos)) & one) << np.uint64(j)
                    hits[row] = lookup[im]
                cols[di] |= hits[row]
    return cols


@dataclass(frozen=True)
class PartitionTable:
    """Cell measures mu(A_S), S = containment pattern, nonempty cells only.

    weighted_sum (cell route) and theta_sum (per-block measure route)
    are the two sides of the identity sum_S |S| mu(A_S) = sum_i theta_i;
    construction fails if they ever disagree.
    """

    d: int
    nbits: int
    p: Fraction
    cells: dict
    total: Fraction
    weighted_sum: Fraction
    theta_sum: Fraction
    theta: tuple

    def small_mass(self, bound: int) -> Fraction:
        """Exact mass of cells with |S| <= bound."""
        return sum((v for s, v in self.cells.items() if s.bit_count() <= bound),
                   Fraction(0))


def partition_table(A: EdgePredicate, sys: SteinerSystem, fam: ForbiddenFamily,
                    n: int, p, cap_bits: int | None = None,
                    workers: int = 1) -> PartitionTable:
    """Exact mu(A_S) for every containment pattern S over the blocks."""
    p = Fraction(p)
    if fam.r != sys.r:
        raise ParameterError(
            f"uniformity mismatch: family r={fam.r}, system r={sys.r}")
    if sys.n != n:
        raise ParameterError(f"system on {sys.n} vertices, space on {n}")
    d = sys.d
    if d > MAX_PARTITION_BLOCKS:
        raise FeasibilityError(
            f"{d} blocks exceed the 2^{MAX_PARTITION_BLOCKS} cell cap")
    nbits = check_exact_feasible(n, fam.r, cap_bits)
    blocks = sys.blocks

    def one(chunk):
        start, end = chunk
        masks = np.arange(start, end, dtype=np.uint64)
        sat = A.batch(masks, n, fam.r)
        cols = _containment_columns(masks, n, fam, blocks)
        pattern = np.zeros(masks.shape, dtype=np.int64)
        for i in range(d):
            pattern |= cols[i].astype(np.int64) << i
        key = pattern[sat] * (nbits + 1) + np.bitwise_count(masks[sat]).astype(np.int64)
        return np.unique(key, return_counts=True)

    agg: dict = {}
    for uniq, counts in map_chunks(one, mask_chunks(nbits), workers):
        for k, c in zip(uniq.tolist(), counts.tolist()):
            agg[k] = agg.get(k, 0) + c
    pe, qe = weight_powers(p, nbits)
    cells: dict = {}
    for k in sorted(agg):
        s, e = divmod(k, nbits + 1)
        cells[s] = cells.get(s, Fraction(0)) + agg[k] * pe[e] * qe[nbits - e]
    total = sum(cells.values(), Fraction(0))
    weighted = sum((s.bit_count() * v for s, v in cells.items()), Fraction(0))
    theta = tuple(block_theta(A, b, fam, n, p, cap_bits=cap_bits,
                              workers=workers) for b in blocks)
    theta_sum = sum(theta, Fraction(0))
    if weighted != theta_sum:
        raise ConstructionError(
            f"containment-pattern identity failed: cell route {weighted} "
            f"!= block route {theta_sum}")
    return PartitionTable(d=d, nbits=nbits, p=p, cells=cells, total=total,
                          weighted_sum=weighted, theta_sum=theta_sum,
                          theta=theta)


@dataclass(frozen=True)
class ProjectionCell:
    pattern: int
    size: int
    mu: Fraction
    bound: Fraction
    ok: bool
    slack: Fraction


@dataclass(frozen=True)
class ProjectionReport:
    ok: bool
    cells: tuple


def projection_bound_check(table: PartitionTable, mu_mB,
                           d: int | None = None) -> ProjectionReport:
    """Check mu(A_S) <= mu_mB^(d-|S|) cell-wise; blocks outside S are
    r-set disjoint, so the events 'block i avoids the family' are
    independent and their product measure dominates each cell."""
    mu_mB = Fraction(mu_mB)
    d = table.d if d is None else d
    cells = []
    for s in sorted(table.cells):
        mu = table.cells[s]
        bound = mu_mB ** (d - s.bit_count())
        cells.append(ProjectionCell(pattern=s, size=s.bit_count(), mu=mu,
                                    bound=bound, ok=mu <= bound,
                                    slack=bound - mu))
    return ProjectionReport(ok=all(c.ok for c in cells), cells=tuple(cells))


def tail_mass(nu, d: int, mu_mB, table: PartitionTable | None = None) -> Fraction:
    """sum_{i=0}^{floor(nu d)} C(d,i) mu_mB^(d-i), the closed-form bound
    on the mass of cells with small |S|.

    When a PartitionTable is supplied, the bound is checked against the
    table's true small-cell mass; a failure (impossible for consistent
    inputs) raises.
    """
    nu = Fraction(nu)
    if not 0 <= nu <= 1:
        raise ParameterError(f"nu must lie in [0, 1], got {nu}")
    if d < 0:
        raise ParameterError("d must be >= 0")
    mu_mB = Fraction(mu_mB)
    cut = floor(nu * d)
    value = sum((comb(d, i) * mu_mB ** (d - i) for i in range(cut + 1)),
                Fraction(0))
    if table is not None:
        small = table.small_mass(cut)
        if value < small:
            raise ConstructionError(
                f"tail bound {value} below true small-cell mass {small}; "
                f"mu_mB or the table do not match")
    return value


@dataclass(frozen=True)
class LemmaReport:
    """theta_i per block, the threshold set I, and the eta chain check.

    chain_ok records nu/2 <= eta + (1-eta)*gamma, evaluated only when
    the closed-form tail mass is at most mu(A)/2 (the regime where the
    partition argument forces it); otherwise None.
    """

    theta: tuple
    index_set: tuple
    eta: Fraction
    mu_A: MeasureResult
    d: int
    gamma: Fraction
    nu: Fraction
    mu_mB: Fraction
    tail: Fraction
    tail_small: bool
    chain_ok: bool | None


def lemma_report(A: EdgePredicate, sys: SteinerSystem, fam: ForbiddenFamily,
                 params: LemmaParameters, p, cap_bits: int | None = None,
                 workers: int = 1) -> LemmaReport:
    """Compute theta_1..theta_d, I = {i : theta_i >= gamma mu(A)}, eta."""
    if fam.r != sys.r:
        raise ParameterError(
            f"uniformity mismatch: family r={fam.r}, system r={sys.r}")
    if params.m is not None and params.m != sys.m:
        raise ParameterError(
            f"params.m={params.m} disagrees with system block order {sys.m}")
    n = sys.n
    mu_A = exact_measure(n, fam.r, p, A, cap_bits=cap_bits, workers=workers)
    theta = tuple(block_theta(A, b, fam, n, p, cap_bits=cap_bits,
                              workers=workers) for b in sys.blocks)
    gamma = params.gamma
    threshold = gamma * mu_A.value
    index_set = tuple(i for i, th in enumerate(theta) if th >= threshold)
    d = sys.d
    eta = Fraction(len(index_set), d) if d else Fraction(0)
    mu_mB = exact_measure(sys.m, fam.r, p, EdgePredicate.forb(fam),
                          cap_bits=cap_bits, workers=workers).value
    tail = tail_mass(params.nu, d, mu_mB)
    tail_small = mu_A.value > 0 and tail <= mu_A.value / 2
    chain_ok = (params.nu / 2 <= eta + (1 - eta) * gamma) if tail_small else None
    return LemmaReport(theta=theta, index_set=index_set, eta=eta, mu_A=mu_A,
                       d=d, gamma=gamma, nu=params.nu, mu_mB=mu_mB, tail=tail,
                       tail_small=tail_small, chain_ok=chain_ok)


@dataclass(frozen=True)
class SupersatReport:
    """The dense m-subset set X and the copy-count floor it certifies."""

    n: int
    m: int
    t: int
    gamma: Fraction
    mu_A: Fraction
    x_size: int
    x_members: tuple
    eta_eff: Fraction
    best_graph: RUniformGraph | None
    best_mset_count: int
    distinct_copies: int
    delta_floor: Fraction
    averaging_lhs: Fraction
    averaging_rhs: Fraction
    averaging_ok: bool


def x_set(A: EdgePredicate, fam: ForbiddenFamily, m: int, gamma, n: int, p,
          cap_bits: int | None = None, workers: int = 1) -> SupersatReport:
    """X = {m-subsets D : theta_D >= gamma mu(A)} over ALL m-subsets.

    Also locates the satisfying graph with the most containment
    m-subsets and checks the averaging inequality
    sum_D theta_D >= gamma mu(A) |X| that drives the count floor.
    """
    p = Fraction(p)
    gamma = Fraction(gamma)
    if not 0 < gamma <= 1:
        raise ParameterError(f"gamma must lie in (0, 1], got {gamma}")
    r = fam.r
    if not 1 <= m <= n:
        raise ParameterError(f"need 1 <= m <= n, got (m={m}, n={n})")
    nbits = check_exact_feasible(n, r, cap_bits)
    dsets = subsets_colex(n, m)
    nd = len(dsets)

    def one(chunk):
        start, end = chunk
        masks = np.arange(start, end, dtype=np.uint64)
        sat = A.batch(masks, n, r)
        cols = _containment_columns(masks, n, fam, dsets)
        satpops = np.bitwise_count(masks[sat]).astype(np.int64)
        hists = np.zeros((nd, nbits + 1), dtype=np.int64)
        for di in range(nd):
            hists[di] = np.bincount(satpops[cols[di][sat]], minlength=nbits + 1)
        mcount = cols[:, sat].sum(axis=0, dtype=np.int64)
        whist = np.zeros(nbits + 1, dtype=np.int64)
        np.add.at(whist, satpops, mcount)
        if mcount.size:
            bi = int(np.argmax(mcount))  # first max: smallest mask wins ties
            best = (int(mcount[bi]), int(masks[sat][bi]))
        else:
            best = None
        return hists, whist, best

    hists = np.zeros((nd, nbits + 1), dtype=np.int64)
    whist = np.zeros(nbits + 1, dtype=np.int64)
    best = None
    for part_h, part_w, part_best in map_chunks(one, mask_chunks(nbits), workers):
        hists += part_h
        whist += part_w
        if part_best is not None:
            if best is None or part_best[0] > best[0] or (
                    part_best[0] == best[0] and part_best[1] < best[1]):
                best = part_best
    theta = [value_from_histogram(hists[di].tolist(), p, nbits)
             for di in range(nd)]
    mu_A = exact_measure(n, r, p, A, cap_bits=cap_bits, workers=workers).value
    threshold = gamma * mu_A
    x_members = tuple(dsets[di] for di in range(nd) if theta[di] >= threshold)
    x_size = len(x_members)
    lhs = sum(theta, Fraction(0))
    lhs_mask_route = value_from_histogram(whist.tolist(), p, nbits)
    if lhs != lhs_mask_route:
        raise ConstructionError(
            f"averaging accumulators disagree: {lhs} != {lhs_mask_route}")
    rhs = gamma * mu_A * x_size
    t = fam.t
    eta_eff = Fraction(x_size, nd)
    delta_floor = gamma * eta_eff * Fraction(n ** t, (2 * m) ** t)
    if best is None:
        best_graph, best_mset_count, distinct = None, 0, 0
    else:
        best_mset_count, best_mask = best
        best_graph = RUniformGraph(n=n, r=r, edge_mask=best_mask)
        distinct = count_induced(best_graph, fam)
        if m >= t and distinct < best_mset_count // comb(n - t, m - t):
            raise ConstructionError(
                f"copy floor violated: {distinct} distinct copies but "
                f"{best_mset_count} containment m-subsets")
    return SupersatReport(n=n, m=m, t=t, gamma=gamma, mu_A=mu_A,
                          x_size=x_size, x_members=x_members, eta_eff=eta_eff,
                          best_graph=best_graph,
                          best_mset_count=best_mset_count,
                          distinct_copies=distinct, delta_floor=delta_floor,
                          averaging_lhs=lhs, averaging_rhs=rhs,
                          averaging_ok=lhs >= rhs)


@dataclass(frozen=True)
class CountingFloor:
    ratio: Fraction
    floor: Fraction
    ok: bool
    proviso_met: bool


def counting_floor(n: int, m: int, t: int, gamma, eta) -> CountingFloor:
    """Compare gamma eta C(n,m)/C(n-t,m-t) with gamma eta (2m)^-t n^t.

    ok is guaranteed when n >= 2t (proviso_met); below that the exact
    comparison is still reported and may legitimately fail.
    """
    if not 0 <= t <= m <= n:
        raise ParameterError(f"need 0 <= t <= m <= n, got ({n}, {m}, {t})")
    ge = Fraction(gamma) * Fraction(eta)
    ratio = ge * Fraction(comb(n, m), comb(n - t, m - t))
    floor_val = ge * Fraction(n ** t, (2 * m) ** t) if t else ge
    return CountingFloor(ratio=ratio, floor=floor_val, ok=ratio >= floor_val,
                         proviso_met=n >= 2 * t)


@dataclass(frozen=True)
class Instance:
    """A bundled lemma instance: space, class, family, system, knobs."""

    n: int
    r: int
    p: Fraction
    predicate: EdgePredicate
    family: ForbiddenFamily
    system: SteinerSystem | None = None
    params: LemmaParameters | None = None


def params_to_json_obj(params: LemmaParameters) -> dict:
    obj: dict = {"nu": fraction_str(params.nu), "gamma": fraction_str(params.gamma)}
    for key, val in (("epsilon", params.epsilon),
                     ("epsilon_prime", params.epsilon_prime),
                     ("lambda", params.lam)):
        if val is not None:
            obj[key] = fraction_str(val)
    if params.m is not None:
        obj["m"] = params.m
    return obj


def params_from_json_obj(obj) -> LemmaParameters:
    def frac(key):
        return Fraction(obj[key]) if key in obj else None

    try:
        return LemmaParameters(nu=Fraction(obj["nu"]), gamma=frac("gamma"),
                               epsilon=frac("epsilon"),
                               epsilon_prime=frac("epsilon_prime"),
                               lam=frac("lambda"),
                               m=int(obj["m"]) if "m" in obj else None)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad parameter object: {exc}", 0) from None


def instance_to_json_obj(inst: Instance) -> dict:
    obj = {"n": inst.n, "r": inst.r, "p": fraction_str(inst.p),
           "predicate": predicate_to_json_obj(inst.predicate),
           "family": family_to_json_obj(inst.family)}
    if inst.system is not None:
        obj["system"] = system_to_json_obj(inst.system)
    if inst.params is not None:
        obj["params"] = params_to_json_obj(inst.params)
    return obj


def instance_from_json_obj(obj) -> Instance:
    try:
        n, r, p = int(obj["n"]), int(obj["r"]), Fraction(obj["p"])
        pred = predicate_from_json_obj(obj["predicate"])
        fam = family_from_json_obj(obj["family"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad instance object: {exc}", 0) from None
    system = system_from_json_obj(obj["system"]) if "system" in obj else None
    params = params_from_json_obj(obj["params"]) if "params" in obj else None
    return Instance(n=n, r=r, p=p, predicate=pred, family=fam, system=system,
                    params=params)


def load_instance(path: str) -> Instance:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from None
    return instance_from_json_obj(obj)


def save_instance(inst: Instance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(instance_to_json_obj(inst)) + "\n")
