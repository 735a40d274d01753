from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import chains, ladder_targets, roof_distances
from selfsim import catalog
from selfsim._support import PreconditionError, ResourceCapExceeded
from selfsim.complexes import (
    ComplexSpace,
    LassoComplex,
    decide_equal,
    distance_profile,
    enumerate_complexes,
    factorizations,
    is_ladder,
    koenig_select,
    ladders_from,
    truncated_complex_category,
    truncated_components,
)
from selfsim.fincat import connected_components, validate_category

TWO_THIRDS = LassoComplex("1", (), ("[1/2,1]", "[0,1/2]"))
ONE_THIRD = LassoComplex("1", (), ("[0,1/2]", "[1/2,1]"))
SEVEN_SIXTEENTHS = LassoComplex("1", ("[0,1/2]", "[1/2,1]", "[1/2,1]", "[1/2,1]"), ("[0,1/2]",))
HALF_POINT = LassoComplex("1", ("1/2",), ("id",))


def test_cantor_truncated_category_is_discrete():
    cat = truncated_complex_category(catalog.build("cantor(2)").system, "*", 3)
    assert len(cat.objects) == 8
    assert cat.non_identity_arrows() == []


def test_freyd_truncated_categories(freyd):
    one = truncated_complex_category(freyd, "1", 1)
    assert len(one.objects) == 5
    assert validate_category(one).ok
    assert len(connected_components(one)) == 1
    two = truncated_complex_category(freyd, "1", 2)
    assert len(two.objects) == 13
    assert len(connected_components(two)) == 1


def test_freyd_components_single(freyd):
    tc = truncated_components(freyd, "1", 6)
    assert [tc.count(r) for r in range(7)] == [1] * 7


def test_walks_constant_path_only():
    S = catalog.walks("original", 12).system
    assert truncated_components(S, "0", 5).count() == 1


def test_unroll():
    assert TWO_THIRDS.unroll(4) == ("[1/2,1]", "[0,1/2]", "[1/2,1]", "[0,1/2]")
    assert HALF_POINT.unroll(3) == ("1/2", "id", "id")
    assert ONE_THIRD.unroll(0) == ()


def test_lasso_needs_cycle():
    with pytest.raises(PreconditionError):
        LassoComplex("1", ("1/2",), ())


def test_half_addresses_stay_close(freyd, half_lassos):
    L, L2 = half_lassos
    assert all(d <= 2 for d in distance_profile(freyd, "1", L, L2, 10))
    assert distance_profile(freyd, "1", L, L, 6) == [0] * 6


def test_half_addresses_equal(freyd, half_lassos):
    L, L2 = half_lassos
    v = decide_equal(freyd, "1", L, L2, 10)
    assert v.tag == "Equal"
    cert = v.certificate
    assert cert.apex.unroll(3) == HALF_POINT.unroll(3)
    assert cert.left_leg.unroll(4) == ("sigma",) * 4
    assert cert.right_leg.unroll(4) == ("tau",) * 4
    assert cert.verify(freyd.module, L, L2, 20)


def test_cantor_words_distinct_at_first_disagreement():
    S = catalog.build("cantor(2)").system
    sectors = sorted(S.module.sectors)
    for k in range(1, 6):
        w = [sectors[0]] * 6
        w2 = list(w)
        w2[k - 1] = sectors[1]
        v = decide_equal(S, "*", LassoComplex("*", tuple(w), (sectors[0],)),
                         LassoComplex("*", tuple(w2), (sectors[0],)), 8)
        assert v.tag == "DistinctAtDepth"
        assert v.depth == k


def test_two_thirds_vs_seven_sixteenths_inconclusive(freyd):
    v = decide_equal(freyd, "1", TWO_THIRDS, SEVEN_SIXTEENTHS, 12, bound=5)
    assert v.tag == "Inconclusive"
    # grows from depth 2 on; the first two truncations are adjacent
    assert list(v.profile) == [1, 1, 2, 3, 7, 14, 29, 58, 117, 234, 469, 938]
    assert all(a < b for a, b in zip(v.profile[1:], v.profile[2:]))
    assert v.evidence["exceeds_bound"] and not v.evidence["span_exists"]


def test_profile_matches_brute_force(freyd):
    M = freyd.module
    for n in (2, 4, 7):
        objs = chains(M.sectors, "1", n)
        assert objs == enumerate_complexes(M, "1", n)
        succ = {c: ladder_targets(M.sectors, freyd.category.arrows, M.left, M.right, "1", c) for c in objs}
        dist = roof_distances(objs, succ, TWO_THIRDS.unroll(n))
        assert distance_profile(freyd, "1", TWO_THIRDS, ONE_THIRD, n)[-1] == dist[ONE_THIRD.unroll(n)]


def test_ladders_match_brute_force(freyd):
    M = freyd.module
    fac = factorizations(M)
    for c in enumerate_complexes(M, "1", 3):
        mine = {t for _, t in ladders_from(M, fac, "1", c)}
        assert mine == ladder_targets(M.sectors, freyd.category.arrows, M.left, M.right, "1", c)


def test_resource_cap():
    with pytest.raises(ResourceCapExceeded):
        enumerate_complexes(catalog.build("cantor(2)").system.module, "*", 20, budget=1000)


def test_koenig_examples():
    assert koenig_select([["0", "1"]] * 6, [{"0": "0", "1": "1"}] * 5, [str(n % 2) for n in range(6)]) == ["0"] * 6
    assert koenig_select([["x"]] * 4, [{"x": "x"}] * 3, ["x"] * 4) == ["x"] * 4
    levels = [[str(i) for i in range(r + 1)] for r in range(6)]
    maps = [{str(t): str(min(t, k)) for t in range(k + 2)} for k in range(5)]
    assert koenig_select(levels, maps, [str(n) for n in range(6)]) == [str(r) for r in range(6)]


@st.composite
def inverse_systems(draw):
    depth = draw(st.integers(1, 5))
    levels = [[str(i) for i in range(draw(st.integers(1, 3)))]]
    maps = []
    for _ in range(depth):
        size = draw(st.integers(1, 4))
        nxt = [f"{len(levels)}.{i}" for i in range(size)]
        maps.append({t: draw(st.sampled_from(levels[-1])) for t in nxt})
        levels.append(nxt)
    picks = [draw(st.sampled_from(level)) for level in levels]
    return levels, maps, picks


@given(inverse_systems())
@settings(max_examples=200, deadline=None)
def test_koenig_output_is_thread(data):
    levels, maps, picks = data
    y = koenig_select(levels, maps, picks)
    for r in range(len(levels) - 1):
        assert maps[r][y[r + 1]] == y[r]


SYSTEMS = ["freyd(2)", "sierpinski(2)", "convergent_sequence", "barycentric(2)"]


@given(st.sampled_from(SYSTEMS), st.integers(1, 3), st.data())
@settings(max_examples=40, deadline=None)
def test_projections_collapse_components(name, n, data):
    S = catalog.build(name).system
    a = S.category.objects[-1]
    tc = truncated_components(S, a, n)
    objs = tc.spaces[n].objects
    c = data.draw(st.sampled_from(objs))
    c2 = data.draw(st.sampled_from(objs))
    if tc.block_of(c) == tc.block_of(c2):
        for r in range(n + 1):
            assert tc.block_of(c[:r]) == tc.block_of(c2[:r])


@given(st.sampled_from(SYSTEMS), st.integers(1, 3))
@settings(max_examples=20, deadline=None)
def test_every_ladder_reverifies(name, n):
    S = catalog.build(name).system
    a = S.category.objects[-1]
    space = ComplexSpace.build(S, a, n)
    for i, row in enumerate(space.ladders):
        for j, lad in row:
            assert is_ladder(S.module, a, space.objects[i], space.objects[j], lad)


def test_equal_certificates_bound_distance(freyd, half_lassos):
    L, L2 = half_lassos
    apex = decide_equal(freyd, "1", L, L2, 8).certificate.apex
    for pair in ((L, L2), (apex, L), (apex, L2)):
        v = decide_equal(freyd, "1", *pair, 8)
        assert v.tag == "Equal"
        assert max(distance_profile(freyd, "1", *pair, 8)) <= 2


def test_distinct_profile_marks_infinity():
    S = catalog.build("cantor(2)").system
    v = decide_equal(S, "*", LassoComplex("*", (), ("0",)), LassoComplex("*", (), ("1",)), 4)
    assert v.tag == "DistinctAtDepth" and math.isinf(v.profile[-1])
