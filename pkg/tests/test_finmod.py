from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import tensor_partition
from selfsim import catalog
from selfsim.fincat import (
    FinCategory,
    SetFunctor,
    check_functor_nondegenerate,
    opposite,
    representable,
    validate_functor,
)
from selfsim.finmod import (
    Module,
    check_module_finite,
    check_module_nondegenerate,
    hom_module,
    product_system,
    tensor,
    tensor_presheaf,
    terminal_system,
    validate_module,
    validate_system,
)
from selfsim.randgen import random_instance


def two_step_category() -> FinCategory:
    # sigma, tau: 0 -> 1 and u: 1 -> 2 with distinct composites
    return FinCategory(
        ["0", "1", "2"],
        [("sigma", "0", "1"), ("tau", "0", "1"), ("u", "1", "2"), ("v", "0", "2"), ("w", "0", "2")],
        {("u", "sigma"): "v", ("u", "tau"): "w"},
    )


def partition_of(T) -> dict[str, set[frozenset]]:
    return {a: {frozenset(c) for c in cls} for a, cls in T.classes.items() if cls}


def oracle_partition(M: Module, X: SetFunctor) -> dict[str, set[frozenset]]:
    out = tensor_partition(M.sectors, M.right, X.on_objects, X.on_arrows, M.base.arrows)
    return {a: cls for a, cls in out.items() if cls}


def test_freyd_module_valid(freyd):
    assert validate_module(freyd.module).ok


def test_broken_mixed_associativity_reported():
    cat = two_step_category()
    M = hom_module(cat)
    right = dict(M.right)
    right[("u", "sigma")] = "w"
    broken = Module(cat, [(m, b, a) for m, (b, a) in M.sectors.items()], M.left, right)
    rep = validate_module(broken)
    assert "bimodule" in rep.kinds()


def test_hom_module_valid(parallel_pair):
    assert validate_module(hom_module(parallel_pair)).ok
    assert validate_module(hom_module(two_step_category())).ok


def test_finiteness_counts(freyd):
    assert check_module_finite(freyd.module)["1"] == 9
    assert check_module_finite(catalog.build("cantor(2)").system.module) == {"*": 2}
    cat = FinCategory(["a"], [], {})
    assert check_module_finite(Module(cat, [], {}, {})) == {"a": 0}


def test_catalog_modules_nondegenerate(freyd):
    assert check_module_nondegenerate(freyd.module).ok
    assert check_module_nondegenerate(catalog.build("sierpinski(2)").system.module).ok


def test_fork_failure_detected(parallel_pair):
    M = Module(parallel_pair, [("m", "0", "0"), ("n", "0", "1")],
               {("sigma", "m"): "n", ("tau", "m"): "n"}, {})
    assert validate_module(M).ok
    rep = check_module_nondegenerate(M)
    assert rep.first().kind == "ND2"
    assert rep.first().detail["arrows"] == ["sigma", "tau"]


def test_freyd_tensor_example(freyd):
    X = SetFunctor(freyd.category, {"0": ["*"], "1": ["u", "v"]}, {("sigma", "*"): "u", ("tau", "*"): "v"})
    T = tensor(freyd.module, X)
    assert T.sizes() == {"0": 1, "1": 3}
    assert T.same(("1/2", "*"), ("[0,1/2]", "v"))
    assert T.same(("1/2", "*"), ("[1/2,1]", "u"))
    assert not T.same(("[0,1/2]", "u"), ("[1/2,1]", "v"))
    assert partition_of(T) == oracle_partition(freyd.module, X)


def test_discrete_tensor_counts():
    D = catalog.build("walks(modified,6)").discrete
    S = D.to_system()
    X = SetFunctor(S.category, {a: [f"x{i}" for i in range(int(a) % 3 + 1)] for a in S.category.objects}, {})
    T = tensor(S.module, X)
    for a in S.category.objects:
        expect = sum(len(S.module.between(b, a)) * len(X(b)) for b in S.category.objects)
        assert T.sizes()[a] == expect


def test_tensor_with_representable_is_column(freyd):
    M = freyd.module
    for b in freyd.category.objects:
        T = tensor(M, representable(freyd.category, b))
        col = M.column(b)
        assert T.sizes() == {a: len(col(a)) for a in freyd.category.objects}


def test_presheaf_tensor_specialisations(freyd):
    M = freyd.module
    X = SetFunctor(freyd.category, {"0": ["*"], "1": ["u", "v"]}, {("sigma", "*"): "u", ("tau", "*"): "v"})
    for a in freyd.category.objects:
        assert len(tensor_presheaf(M.row(a), X).classes) == tensor(M, X).sizes()[a]
    # co-Yoneda: the representable presheaf at a recovers X(a)
    op = opposite(freyd.category)
    for a in freyd.category.objects:
        Y = representable(op, a)
        assert len(tensor_presheaf(Y, X).classes) == len(X(a))


def test_products():
    cc = product_system(catalog.build("cantor(2)").system, catalog.build("cantor(3)").system)
    assert len(cc.category.objects) == 1 and len(cc.module.sectors) == 6
    f = catalog.build("freyd(2)").system
    ff = product_system(f, f)
    assert len(ff.category.objects) == 4
    assert len(ff.module.between("(1,1)", "(1,1)")) == 4
    assert validate_system(ff).ok
    unit = product_system(f, terminal_system())
    assert sorted(unit.module.counts().values()) == sorted(f.module.counts().values())
    assert validate_module(unit.module).ok


@given(st.integers(0, 100_000))
@settings(max_examples=200, deadline=None)
def test_tensor_matches_closure_oracle(seed):
    inst = random_instance(seed)
    M, X = inst.system.module, inst.functor
    assert partition_of(tensor(M, X)) == oracle_partition(M, X)


@given(st.integers(0, 100_000))
@settings(max_examples=100, deadline=None)
def test_tensor_preserves_nondegeneracy(seed):
    inst = random_instance(seed)
    M, X = inst.system.module, inst.functor
    if check_module_nondegenerate(M).ok and check_functor_nondegenerate(X).ok:
        TX = tensor(M, X).as_functor()
        assert validate_functor(TX).ok
        assert check_functor_nondegenerate(TX).ok


@given(st.integers(0, 100_000))
@settings(max_examples=50, deadline=None)
def test_tensor_is_functorial_in_x(seed):
    # X -> 1 (the terminal functor) must carry equal classes to equal classes
    inst = random_instance(seed)
    M, X = inst.system.module, inst.functor
    cat = X.base
    one = SetFunctor(cat, {a: ["pt"] for a in cat.objects}, {(f, "pt"): "pt" for f in cat.non_identity_arrows()})
    T, T1 = tensor(M, X), tensor(M, one)
    for (m, x), cid in T.class_of.items():
        for (m2, x2), cid2 in T.class_of.items():
            if cid == cid2:
                assert T1.same((m, "pt"), (m2, "pt"))


def test_discrete_tensor_never_merges():
    S = catalog.build("cantor(3)").system
    X = SetFunctor(S.category, {"*": ["p", "q"]}, {})
    assert tensor(S.module, X).sizes() == {"*": 6}
