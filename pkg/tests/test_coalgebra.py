from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfsim import catalog
from selfsim._support import PreconditionError
from selfsim.catalog import freyd_system
from selfsim.coalgebra import (
    FixedPoint,
    FixedPointFailure,
    check_fixed_point,
    check_reso_connected,
    check_truncated_fixed_point,
    coalgebra_from_tables,
    coalgebra_morphism_check,
    representable_coalgebra,
    resolutions,
    terminal_map,
    truncated_solution_functor,
    validate_coalgebra,
)
from selfsim.complexes import LassoComplex, complex_id
from selfsim.finmod import hom_system, terminal_system

# small enough to enumerate every element at depth 4
SMALL = ["cantor_stream", "freyd_nondyadic", "freyd_grid", "freyd_three_point", "freyd_representable"]


def test_catalog_coalgebras_validate():
    for name in catalog.NONDEGENERATE_COALGEBRAS:
        assert validate_coalgebra(catalog.coalgebra(name)).ok, name


def test_degenerate_carrier_flagged():
    rep = validate_coalgebra(catalog.freyd_degenerate())
    assert rep.first().kind == "carrier ND2"
    assert validate_coalgebra(catalog.freyd_degenerate(), require_nondegenerate=False).ok


def test_naturality_violation():
    C = catalog.freyd_three_point()
    xi = dict(C.xi)
    # the left endpoint now claims to live in the right half
    xi[("1", "0")] = ("[1/2,1]", "0")
    broken = coalgebra_from_tables(C.system, {"0": ["*"], "1": ["0", "2/3", "1"]},
                                   {("sigma", "*"): "0", ("tau", "*"): "1"}, xi)
    rep = validate_coalgebra(broken)
    assert rep.first().kind == "naturality"
    assert rep.first().detail["arrow"] == "sigma"


def test_bad_sector_reported():
    C = catalog.freyd_three_point()
    xi = dict(C.xi)
    xi[("1", "2/3")] = ("id", "*")
    rep = validate_coalgebra(coalgebra_from_tables(C.system, {"0": ["*"], "1": ["0", "2/3", "1"]},
                                                   {("sigma", "*"): "0", ("tau", "*"): "1"}, xi))
    assert rep.first().kind == "bad sector"


def test_cantor_stream_has_one_resolution_per_depth():
    C = catalog.cantor_stream(2, 3)
    for w in C.carrier("*"):
        for n in range(6):
            (r,) = resolutions(C, "*", w, n)
            assert "".join(r.complex) == (w * 3)[:n]


def test_midpoint_has_three_representatives():
    C = catalog.freyd_grid(3)
    assert len(C.representatives("1", "1/2")) == 3
    assert len(C.representatives("1", "1/8")) == 1
    assert [len(resolutions(C, "1", "1/2", n)) for n in range(4)] == [1, 3, 5, 7]


def test_resolutions_connected_on_catalog():
    for name in SMALL:
        C = catalog.coalgebra(name)
        for a, x in C.carrier.elements():
            for n in range(1, 4):
                if resolutions(C, a, x, n):
                    assert check_reso_connected(C, a, x, n).ok, (name, x, n)


def test_degenerate_carrier_loses_spans():
    rep = check_reso_connected(catalog.freyd_degenerate(), "1", "u", 2)
    assert rep.first().kind == "no span"


def test_terminal_map_cantor_reads_word():
    C = catalog.cantor_stream(2, 4)
    img = terminal_map(C, "*", "0110", 6)
    assert "".join(img.representative) == "011001"
    assert img.resolutions == 1


def test_terminal_map_freyd_single_component():
    C = catalog.freyd_grid(2)
    a = terminal_map(C, "1", "1/2", 4)
    assert a.resolutions == len(resolutions(C, "1", "1/2", 4))
    # each truncation of the interval is connected, so every point shares a block
    imgs = {x: terminal_map(C, "1", x, 4).block for x in C.carrier("1")}
    assert set(imgs.values()) == {a.block}


def test_terminal_map_rejects_failing_system(parallel_pair):
    S = hom_system(parallel_pair)
    C = coalgebra_from_tables(S, {"0": [], "1": []}, {}, {})
    with pytest.raises(PreconditionError):
        terminal_map(C, "1", "x", 1)


@pytest.mark.parametrize("name", SMALL)
def test_terminal_map_is_natural(name):
    C = catalog.coalgebra(name)
    S = C.system
    cat = S.category
    for n in range(1, 5):
        X, spaces = truncated_solution_functor(S, n)

        def label(a, x):
            return complex_id(terminal_map(C, a, x, n, assume_solvable=True, space=spaces[a]).representative)

        for f in cat.non_identity_arrows():
            a, a2 = cat.arrows[f]
            for x in C.carrier(a):
                if resolutions(C, a, x, n) and resolutions(C, a2, C.carrier.act(f, x), n):
                    assert X.act(f, label(a, x)) == label(a2, C.carrier.act(f, x))


def test_product_stream_projects():
    P = catalog.product_stream(2, 3, 2)
    A, B = catalog.cantor_stream(2, 2), catalog.cantor_stream(3, 2)
    for e in P.carrier(P.carrier.base.objects[0]):
        w, v = e.strip("()").split(",")
        img = terminal_map(P, P.carrier.base.objects[0], e, 4)
        left = tuple(s.strip("()").split(",")[0] for s in img.representative)
        right = tuple(s.strip("()").split(",")[1] for s in img.representative)
        assert left == terminal_map(A, "*", w, 4).representative
        assert right == terminal_map(B, "*", v, 4).representative


def test_terminal_system_fixed_point():
    S = terminal_system()
    C = coalgebra_from_tables(S, {"*": ["pt"]}, {}, {("*", "pt"): ("e", "pt")})
    fp = check_fixed_point(C)
    assert isinstance(fp, FixedPoint)
    assert fp.psi == {"e": {"pt": "pt"}}
    assert not fp.unoccupied


def test_empty_carrier_is_unoccupied_fixed_point():
    S = catalog.build("cantor(2)").system
    fp = check_fixed_point(coalgebra_from_tables(S, {"*": []}, {}, {}))
    assert isinstance(fp, FixedPoint) and fp.unoccupied


def test_finite_streams_are_not_fixed_points():
    fp = check_fixed_point(catalog.cantor_stream(2, 3))
    assert isinstance(fp, FixedPointFailure)
    assert fp.witness.kind == "not surjective"
    fp = check_fixed_point(catalog.freyd_nondyadic(3))
    assert isinstance(fp, FixedPointFailure)


def test_collapsing_structure_not_injective():
    S = terminal_system()
    C = coalgebra_from_tables(S, {"*": ["p", "q"]}, {}, {("*", "p"): ("e", "p"), ("*", "q"): ("e", "p")})
    fp = check_fixed_point(C)
    assert isinstance(fp, FixedPointFailure) and fp.witness.kind == "not injective"


def test_truncated_fixed_point_counts():
    S = catalog.build("cantor(2)").system
    for n in range(5):
        rep = check_truncated_fixed_point(S, "*", n)
        assert rep.ok and rep.info["size"] == 2 ** (n + 1)
    assert check_truncated_fixed_point(freyd_system(2), "1", 3).ok


def test_representable_cantor():
    S = catalog.build("cantor(2)").system
    r = representable_coalgebra(S, LassoComplex("*", (), ("0", "1")), 4)
    assert r.coalgebra.carrier.size() == 5
    assert r.kappa[("*", "(0:id_*)")] == ("0", "1", "0", "1")
    assert r.kappa[("*", "(4:id_*)")] == ()
    assert validate_coalgebra(r.coalgebra).ok


def test_representable_freyd_half():
    S = freyd_system(2)
    r = representable_coalgebra(S, LassoComplex("1", ("1/2",), ("id",)), 3)
    assert r.kappa[("1", "(0:id_1)")] == ("1/2", "id", "id")
    assert r.kappa[("1", "(1:sigma)")] == ("0", "id")
    assert r.kappa[("1", "(1:tau)")] == ("1", "id")
    assert validate_coalgebra(r.coalgebra).ok


def test_representable_rejects_broken_lasso():
    with pytest.raises(PreconditionError):
        representable_coalgebra(freyd_system(2), LassoComplex("1", ("0", "0"), ("id",)), 3)


def test_kappa_agrees_with_resolutions():
    r = representable_coalgebra(freyd_system(2), LassoComplex("1", ("[1/2,1]",), ("[0,1/2]",)), 5)
    C = r.coalgebra
    for (a, x), c in r.kappa.items():
        (res,) = resolutions(C, a, x, len(c))
        assert res.complex == c


def test_identity_is_a_morphism():
    C = catalog.freyd_grid(2)
    h = {(a, x): x for a, x in C.carrier.elements()}
    assert coalgebra_morphism_check(C, C, h).ok
    bad = dict(h)
    bad[("1", "1/4")] = "3/4"
    assert not coalgebra_morphism_check(C, C, bad).ok


@given(st.sampled_from(SMALL), st.integers(0, 4), st.data())
@settings(max_examples=60, deadline=None)
def test_resolutions_exist_until_boundary(name, n, data):
    C = catalog.coalgebra(name)
    a, x = data.draw(st.sampled_from(list(C.carrier.elements())))
    rs = resolutions(C, a, x, n)
    if not C.boundary:
        assert rs
    for r in rs:
        assert r.depth == n and r.elements[0] == x
        # each step lands in the class the structure map names
        obj = a
        for m, e, e2 in zip(r.complex, r.elements, r.elements[1:]):
            assert (m, e2) in C.representatives(obj, e)
            obj = C.system.module.src(m)
