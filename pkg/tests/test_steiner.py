from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hlab.errors import ConstructionError, ParameterError, ParseError
from hlab.hypergraph import unrank_subset
from hlab.steiner import (SteinerSystem, greedy_system, load_system,
                          maximality_report, nibble_system, permute_system,
                          save_system, system_from_json_obj,
                          system_to_json_obj, uncovered_ranks, verify_system)

from oracles import max_packing

FANO = ((0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6),
        (2, 4, 5))


@st.composite
def parameters(draw):
    r = draw(st.integers(1, 3))
    m = draw(st.integers(r + 1, r + 3))
    n = draw(st.integers(m, m + 5))
    return r, m, n


def test_verify_fano():
    report = verify_system(2, 3, 7, FANO)
    assert report.valid
    assert report.d == 7
    assert report.covered == 21
    assert report.uncovered_fraction == 0
    assert report.violations == ()


def test_verify_detects_double_cover():
    report = verify_system(2, 3, 4, [(0, 1, 2), (0, 1, 3)])
    assert not report.valid
    assert (0, 1) in report.violations


def test_verify_empty():
    report = verify_system(2, 3, 7, [])
    assert report.valid
    assert report.d == 0
    assert report.uncovered_fraction == 1


def test_verify_structural_issues():
    report = verify_system(2, 3, 5, [(0, 1), (2, 1, 0), (0, 1, 9)])
    assert not report.valid
    assert len(report.structural) == 3


def test_system_rejects_invalid():
    with pytest.raises(ConstructionError):
        SteinerSystem(r=2, m=3, n=4, blocks=((0, 1, 2), (0, 1, 3)))
    with pytest.raises(ParameterError):
        SteinerSystem(r=3, m=3, n=5, blocks=())


def test_system_derived_fields():
    sys = SteinerSystem(r=2, m=3, n=7, blocks=FANO)
    assert sys.d == 7
    assert sys.covered == 21
    assert sys.uncovered_fraction == 0
    assert uncovered_ranks(sys) == []


def test_greedy_determinism():
    a = greedy_system(2, 3, 9, seed=5)
    b = greedy_system(2, 3, 9, seed=5)
    assert a == b
    c = greedy_system(2, 3, 9, seed=6)
    assert a != c
    assert greedy_system(2, 3, 9, seed=5, stream=1) != a


def test_greedy_four_points_always_one_block():
    assert max_packing(2, 3, 4) == 1
    for seed in range(25):
        assert greedy_system(2, 3, 4, seed=seed).d == 1


def test_greedy_reaches_fano_size():
    assert max_packing(2, 3, 7) == 7
    best = max(greedy_system(2, 3, 7, seed=s).d for s in range(300))
    assert best == 7


def test_greedy_rejects_bad_parameters():
    with pytest.raises(ParameterError):
        greedy_system(3, 3, 5, seed=0)
    with pytest.raises(ParameterError):
        greedy_system(2, 5, 4, seed=0)
    with pytest.raises(ParameterError):
        greedy_system(0, 2, 4, seed=0)


@given(parameters(), st.integers(0, 2 ** 32))
def test_constructed_systems_valid(params, seed):
    r, m, n = params
    sys = greedy_system(r, m, n, seed=seed)
    report = sys.verify()
    assert report.valid
    assert report.covered == sys.d * comb(m, r)
    assert sys.d <= comb(n, r) // comb(m, r)
    assert maximality_report(sys).maximal


def test_nibble_valid_and_maximal():
    sys = nibble_system(2, 3, 20, seed=3)
    assert sys.verify().valid
    assert maximality_report(sys).maximal
    tri = nibble_system(3, 4, 12, seed=1, bite=Fraction(1, 5), rounds=4)
    assert tri.verify().valid
    assert maximality_report(tri).maximal


def test_nibble_zero_rounds_is_greedy():
    for seed in (0, 1, 9):
        assert (nibble_system(2, 3, 12, seed=seed, rounds=0)
                == greedy_system(2, 3, 12, seed=seed))


def test_nibble_determinism():
    a = nibble_system(2, 3, 15, seed=4, bite=Fraction(1, 8), rounds=6)
    b = nibble_system(2, 3, 15, seed=4, bite=Fraction(1, 8), rounds=6)
    assert a == b


def test_nibble_parameter_validation():
    with pytest.raises(ParameterError):
        nibble_system(2, 3, 9, seed=0, bite=Fraction(0))
    with pytest.raises(ParameterError):
        nibble_system(2, 3, 9, seed=0, bite=Fraction(7, 5))
    with pytest.raises(ParameterError):
        nibble_system(2, 3, 9, seed=0, rounds=-1)


def uncovered_pair_triangles(sys: SteinerSystem) -> int:
    pairs = [unrank_subset(k, 2) for k in uncovered_ranks(sys)]
    adj = {v: set() for v in range(sys.n)}
    for a, b in pairs:
        adj[a].add(b)
        adj[b].add(a)
    return sum(1 for a, b in pairs for c in adj[a] & adj[b] if c > b)


def test_maximality_forces_triangle_free_uncovered_graph():
    # Any uncovered triangle would itself be an addable block.
    for n, seed in ((10, 0), (25, 1), (60, 2)):
        sys = greedy_system(2, 3, n, seed=seed)
        assert uncovered_pair_triangles(sys) == 0
    nib = nibble_system(2, 3, 40, seed=5)
    assert uncovered_pair_triangles(nib) == 0


def test_nibble_coverage_bound_from_maximality():
    # Triangle-free uncovered graph has at most n^2/4 of the C(n,2) pairs.
    n = 100
    sys = nibble_system(2, 3, n, seed=0)
    assert sys.uncovered_fraction <= Fraction(n * n // 4, comb(n, 2))


def test_permute_identity_and_invariance():
    sys = SteinerSystem(r=2, m=3, n=7, blocks=FANO)
    assert permute_system(sys, tuple(range(7))) == sys
    rev = permute_system(sys, tuple(reversed(range(7))))
    assert rev.verify().valid
    assert rev.d == 7
    assert rev.covered == sys.covered


@given(st.permutations(range(9)), st.integers(0, 1000))
def test_permute_preserves_report(sigma, seed):
    sys = greedy_system(2, 3, 9, seed=seed)
    out = permute_system(sys, tuple(sigma))
    a, b = sys.verify(), out.verify()
    assert (a.valid, a.d, a.covered, a.uncovered_fraction) == (
        b.valid, b.d, b.covered, b.uncovered_fraction)


def test_permute_relabels_violations():
    raw = [(0, 1, 2), (0, 1, 3)]
    sigma = (3, 2, 1, 0)
    mapped = [tuple(sorted(sigma[v] for v in b)) for b in raw]
    a = verify_system(2, 3, 4, raw)
    b = verify_system(2, 3, 4, mapped)
    relabeled = {tuple(sorted(sigma[v] for v in s)) for s in a.violations}
    assert relabeled == set(b.violations)


def test_permute_rejects_non_bijection():
    sys = greedy_system(2, 3, 5, seed=0)
    with pytest.raises(ParameterError):
        permute_system(sys, (0, 0, 1, 2, 3))


def test_maximality_report_finds_addable():
    sys = SteinerSystem(r=2, m=3, n=7, blocks=((0, 1, 2),))
    report = maximality_report(sys)
    assert report.maximal is False
    assert report.method == "exhaustive"
    assert verify_system(2, 3, 7, sys.blocks + (report.addable,)).valid


def test_maximality_report_sampled_path():
    sys = greedy_system(2, 3, 12, seed=0)
    report = maximality_report(sys, exhaustive_limit=10, samples=500)
    assert report.method == "sampled"
    assert report.maximal is None
    assert report.addable is None
    partial = SteinerSystem(r=2, m=3, n=12, blocks=((0, 1, 2),))
    refute = maximality_report(partial, exhaustive_limit=10, samples=500)
    assert refute.maximal is False
    assert refute.addable is not None


def test_json_round_trip(tmp_path):
    sys = greedy_system(2, 3, 9, seed=7)
    obj = system_to_json_obj(sys)
    assert system_from_json_obj(obj) == sys
    path = tmp_path / "sys.json"
    save_system(sys, str(path))
    assert load_system(str(path)) == sys


def test_json_bad_inputs(tmp_path):
    with pytest.raises(ParseError):
        system_from_json_obj({"r": 2, "m": 3})
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ParseError):
        load_system(str(path))
