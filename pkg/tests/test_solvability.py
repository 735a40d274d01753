from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from selfsim import catalog
from selfsim.catalog import freyd_system
from selfsim.coalgebra import check_truncated_fixed_point
from selfsim.discrete import DiscreteSystem
from selfsim.fincat import FinCategory
from selfsim.finmod import hom_system
from selfsim.randgen import random_instance
from selfsim.solvability import EndPairConfig, check_S, extension_step, survivors


def brute_survivors(S, kind):
    """Greatest fixpoint by direct search over every (sector, sector, sector, arrow, arrow) rung."""
    cat, M = S.category, S.module

    def lm(f, m):
        return m if cat.is_identity(f) else M.left[(f, m)]

    def rm(m, g):
        return m if cat.is_identity(g) else M.right[(m, g)]

    configs = {
        (f, f2)
        for f in cat.arrows
        for f2 in cat.arrows
        if cat.tgt(f) == cat.tgt(f2) and (kind == "cospan" or cat.src(f) == cat.src(f2))
    }

    def steps(f, f2):
        out = set()
        for m in M.into(cat.src(f)):
            for m2 in M.into(cat.src(f2)):
                if kind == "parallel" and m2 != m:
                    continue
                for p in M.sectors:
                    for g in cat.arrows:
                        if cat.tgt(g) != M.src(p) or rm(p, g) != lm(f, m):
                            continue
                        for g2 in cat.arrows:
                            if cat.tgt(g2) == M.src(p) and rm(p, g2) == lm(f2, m2):
                                out.add((g, g2))
        return out

    alive = set(configs)
    while True:
        nxt = {c for c in alive if steps(*c) & alive}
        if nxt == alive:
            return {EndPairConfig(kind, f, f2) for f, f2 in alive}
        alive = nxt


def test_freyd_holds(freyd):
    v = check_S(freyd)
    assert v.tag == "Holds"
    alive = survivors(freyd, "cospan")
    assert alive and all(c.kind == "cospan" for c in alive)
    assert EndPairConfig("cospan", "id_1", "id_1") in alive


def test_hom_on_parallel_pair_fails(parallel_pair):
    S = hom_system(parallel_pair)
    assert EndPairConfig("parallel", "sigma", "tau") in survivors(S, "parallel")
    v = check_S(S)
    assert v.tag == "Fails"
    assert (v.witness.left, v.witness.right) == ("sigma", "tau")


def test_hom_on_cofiltered_poset_holds():
    # x is below both y and z
    poset = FinCategory(["x", "y", "z"], [("xy", "x", "y"), ("xz", "x", "z")], {})
    assert check_S(hom_system(poset)).tag == "Holds"


def test_object_without_sectors_has_no_survivors():
    S = freyd_system(2, extra_objects=["c"])
    for kind in ("cospan", "parallel"):
        assert all(S.category.tgt(c.left) != "c" for c in survivors(S, kind))


def test_truncated_systems_report_unknown():
    S = catalog.build("walks(modified,6)").system
    v = check_S(S)
    assert v.tag == "Unknown"
    assert v.evidence["truncated_result"] == "Holds"


def test_survivors_match_brute_force(freyd, parallel_pair):
    for S in (freyd, hom_system(parallel_pair), catalog.build("sierpinski(2)").system):
        for kind in ("cospan", "parallel"):
            assert survivors(S, kind) == brute_survivors(S, kind)


@given(st.integers(0, 100_000))
@settings(max_examples=60, deadline=None)
def test_survivors_random_oracle_and_fixpoint(seed):
    S = random_instance(seed).system
    for kind in ("cospan", "parallel"):
        alive = survivors(S, kind)
        assert alive == brute_survivors(S, kind)
        assert extension_step(S, alive) == alive


@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)), max_size=6))
@settings(max_examples=100, deadline=None)
def test_discrete_systems_always_hold(entries):
    objects = ["a", "b", "c"]
    counts = {}
    for b, a, k in entries:
        counts[(objects[b], objects[a])] = k
    S = DiscreteSystem.from_counts(objects, counts).to_system()
    assert check_S(S).tag == "Holds"


def test_holds_implies_truncated_fixed_point():
    for name in ("freyd(2)", "sierpinski(2)", "convergent_sequence", "barycentric(2)", "julia"):
        S = catalog.build(name).system
        assert check_S(S).tag == "Holds"
        for a in S.category.objects:
            assert check_truncated_fixed_point(S, a, 2).ok
