"""Modules A ⇸ A, their tensor with set functors, and equational systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Any, Iterable, Mapping

from ._support import Report, UnionFind, Violation, tuple_id
from .fincat import (
    FinCategory,
    SetFunctor,
    check_functor_nondegenerate,
    opposite,
    validate_category,
    validate_functor,
)


class Module:
    """Sectors ``m: b ⇸ a`` with a left action by arrows out of ``a`` and a
    right action by arrows into ``b``.

    Identity actions are filled in automatically; every other composable
    (arrow, sector) pair must be present or validation reports it.
    """

    __slots__ = ("base", "sectors", "left", "right", "_between", "_into", "_from")

    def __init__(
        self,
        base: FinCategory,
        sectors: Iterable[tuple[str, str, str]],
        left: Mapping[tuple[str, str], str],
        right: Mapping[tuple[str, str], str],
    ) -> None:
        self.base = base
        sec: dict[str, tuple[str, str]] = {}
        for ident, b, a in sectors:
            if ident in sec:
                raise ValueError(f"duplicate sector id {ident!r}")
            sec[ident] = (b, a)
        self.sectors = sec
        self.left = dict(left)
        self.right = dict(right)
        for m, (b, a) in sec.items():
            if a in base.identity:
                self.left.setdefault((base.identity[a], m), m)
            if b in base.identity:
                self.right.setdefault((m, base.identity[b]), m)
        between: dict[tuple[str, str], list[str]] = {}
        into: dict[str, list[str]] = {a: [] for a in base.objects}
        out: dict[str, list[str]] = {a: [] for a in base.objects}
        for m in sorted(sec):
            b, a = sec[m]
            between.setdefault((b, a), []).append(m)
            into.setdefault(a, []).append(m)
            out.setdefault(b, []).append(m)
        self._between = {k: tuple(v) for k, v in between.items()}
        self._into = {k: tuple(v) for k, v in into.items()}
        self._from = {k: tuple(v) for k, v in out.items()}

    def src(self, m: str) -> str:
        return self.sectors[m][0]

    def tgt(self, m: str) -> str:
        return self.sectors[m][1]

    def between(self, b: str, a: str) -> tuple[str, ...]:
        return self._between.get((b, a), ())

    def into(self, a: str) -> tuple[str, ...]:
        return self._into.get(a, ())

    def out_of(self, b: str) -> tuple[str, ...]:
        return self._from.get(b, ())

    def act_left(self, f: str, m: str) -> str:
        return self.left[(f, m)]

    def act_right(self, m: str, g: str) -> str:
        return self.right[(m, g)]

    def column(self, b: str) -> SetFunctor:
        """The covariant functor M(b, −)."""
        cat = self.base
        on_objects = {a: self.between(b, a) for a in cat.objects}
        on_arrows = {}
        for f in cat.non_identity_arrows():
            for m in self.between(b, cat.src(f)):
                on_arrows[(f, m)] = self.left[(f, m)]
        return SetFunctor(cat, on_objects, on_arrows)

    def row(self, a: str) -> SetFunctor:
        """The contravariant functor M(−, a), as a functor on the opposite category."""
        op = opposite(self.base)
        on_objects = {b: self.between(b, a) for b in op.objects}
        on_arrows = {}
        for g in self.base.non_identity_arrows():
            for m in self.between(self.base.tgt(g), a):
                on_arrows[(g, m)] = self.right[(m, g)]
        return SetFunctor(op, on_objects, on_arrows)

    def counts(self) -> dict[tuple[str, str], int]:
        return {k: len(v) for k, v in sorted(self._between.items())}

    def __repr__(self) -> str:
        return f"Module({len(self.sectors)} sectors over {self.base!r})"

    def to_json(self) -> dict:
        cat = self.base
        return {
            "sectors": [{"id": m, "src": b, "tgt": a} for m, (b, a) in sorted(self.sectors.items())],
            "left": {f"{f}|{m}": v for (f, m), v in sorted(self.left.items()) if not cat.is_identity(f)},
            "right": {f"{m}|{g}": v for (m, g), v in sorted(self.right.items()) if not cat.is_identity(g)},
        }


def validate_module(M: Module) -> Report:
    cat = M.base
    out: list[Violation] = []
    for m, (b, a) in sorted(M.sectors.items()):
        if b not in cat.identity or a not in cat.identity:
            out.append(Violation("unknown object", {"sector": m}))
    if out:
        return Report(tuple(out))
    for (f, m), v in sorted(M.left.items()):
        if f not in cat.arrows or m not in M.sectors or v not in M.sectors:
            out.append(Violation("unknown entry", {"left": [f, m]}))
        elif cat.src(f) != M.tgt(m) or M.sectors[v] != (M.src(m), cat.tgt(f)):
            out.append(Violation("action typing", {"left": [f, m], "value": v}))
    for (m, g), v in sorted(M.right.items()):
        if g not in cat.arrows or m not in M.sectors or v not in M.sectors:
            out.append(Violation("unknown entry", {"right": [m, g]}))
        elif cat.tgt(g) != M.src(m) or M.sectors[v] != (cat.src(g), M.tgt(m)):
            out.append(Violation("action typing", {"right": [m, g], "value": v}))
    if out:
        return Report(tuple(out))
    for m in sorted(M.sectors):
        b, a = M.sectors[m]
        for f in cat.arrows_from(a):
            if (f, m) not in M.left:
                out.append(Violation("missing action", {"left": [f, m]}))
        for g in cat.arrows_into(b):
            if (m, g) not in M.right:
                out.append(Violation("missing action", {"right": [m, g]}))
    if out:
        return Report(tuple(out))
    for m in sorted(M.sectors):
        b, a = M.sectors[m]
        if M.left[(cat.identity[a], m)] != m:
            out.append(Violation("left unit", {"sector": m}))
        if M.right[(m, cat.identity[b])] != m:
            out.append(Violation("right unit", {"sector": m}))
        for f in cat.arrows_from(a):
            fm = M.left[(f, m)]
            for f2 in cat.arrows_from(cat.tgt(f)):
                if M.left[(f2, fm)] != M.left[(cat.compose(f2, f), m)]:
                    out.append(Violation("left associativity", {"arrows": [f2, f], "sector": m}))
            for g in cat.arrows_into(b):
                if M.right[(fm, g)] != M.left[(f, M.right[(m, g)])]:
                    out.append(Violation("bimodule", {"left": f, "sector": m, "right": g}))
        for g in cat.arrows_into(b):
            mg = M.right[(m, g)]
            for g2 in cat.arrows_into(cat.src(g)):
                if M.right[(mg, g2)] != M.right[(m, cat.compose(g, g2))]:
                    out.append(Violation("right associativity", {"sector": m, "arrows": [g, g2]}))
    return Report(tuple(out))


def check_module_finite(M: Module) -> dict[str, int]:
    """Per target object, the number of diagrams b′ → b ⇸ a."""
    cat = M.base
    return {a: sum(len(cat.arrows_into(M.src(m))) for m in M.into(a)) for a in cat.objects}


def check_module_nondegenerate(M: Module) -> Report:
    for b in M.base.objects:
        rep = check_functor_nondegenerate(M.column(b))
        if not rep.ok:
            v = rep.first()
            return Report((Violation(v.kind, {"source": b, **v.detail}),))
    return Report()


@dataclass(frozen=True)
class TensorResult:
    """Classes of pairs (m, x) with m: b ⇸ a and x ∈ X(b), for each a."""

    module: Module
    functor: SetFunctor
    classes: dict[str, tuple[tuple[tuple[str, str], ...], ...]]
    class_of: dict[tuple[str, str], str]

    def class_id(self, m: str, x: str) -> str:
        return self.class_of[(m, x)]

    def same(self, left: tuple[str, str], right: tuple[str, str]) -> bool:
        return self.class_of[left] == self.class_of[right]

    def members(self, a: str, cid: str) -> tuple[tuple[str, str], ...]:
        for cls in self.classes[a]:
            if class_label(*cls[0]) == cid:
                return cls
        raise KeyError(cid)

    def as_functor(self) -> SetFunctor:
        M = self.module
        cat = M.base
        on_objects = {a: tuple(class_label(*cls[0]) for cls in self.classes[a]) for a in cat.objects}
        on_arrows = {}
        for f in cat.non_identity_arrows():
            for cls in self.classes[cat.src(f)]:
                m, x = cls[0]
                on_arrows[(f, class_label(m, x))] = self.class_of[(M.left[(f, m)], x)]
        return SetFunctor(cat, on_objects, on_arrows)

    def sizes(self) -> dict[str, int]:
        return {a: len(v) for a, v in self.classes.items()}

    def to_json(self) -> dict:
        return {
            a: [{"class": class_label(*cls[0]), "members": [list(p) for p in cls]} for cls in classes]
            for a, classes in self.classes.items()
        }


def class_label(m: str, x: str) -> str:
    return f"{m}⊗{x}"


def tensor(M: Module, X: SetFunctor) -> TensorResult:
    cat = M.base
    uf = UnionFind()
    for m, (b, _) in M.sectors.items():
        for x in X(b):
            uf.add((m, x))
    for m, (b, _) in M.sectors.items():
        for g in cat.arrows_into(b):
            if cat.is_identity(g):
                continue
            mg = M.right[(m, g)]
            for x in X(cat.src(g)):
                uf.union((mg, x), (m, X.act(g, x)))
    classes: dict[str, list[list[tuple[str, str]]]] = {a: [] for a in cat.objects}
    class_of: dict[tuple[str, str], str] = {}
    for group in uf.classes():
        rep = group[0]
        classes[M.tgt(rep[0])].append(group)
        label = class_label(*rep)
        for pair in group:
            class_of[pair] = label
    frozen = {a: tuple(tuple(g) for g in gs) for a, gs in classes.items()}
    return TensorResult(M, X, frozen, class_of)


@dataclass(frozen=True)
class PresheafTensor:
    classes: tuple[tuple[tuple[str, str, str], ...], ...]
    class_of: dict[tuple[str, str, str], int]

    def __len__(self) -> int:
        return len(self.classes)


def tensor_presheaf(Y: SetFunctor, X: SetFunctor) -> PresheafTensor:
    """``Y ⊗ X`` for ``Y`` given on the opposite of ``X``'s base.

    Elements are triples (b, y, x); generators glue (b′, y·g, x) with (b, y, g·x).
    """
    cat = X.base
    uf = UnionFind()
    for b in cat.objects:
        for y, x in product(Y(b), X(b)):
            uf.add((b, y, x))
    for g in cat.non_identity_arrows():
        s, t = cat.arrows[g]
        for y in Y(t):
            yg = Y.act(g, y)
            for x in X(s):
                uf.union((s, yg, x), (t, y, X.act(g, x)))
    groups = tuple(tuple(g) for g in uf.classes())
    class_of = {item: i for i, g in enumerate(groups) for item in g}
    return PresheafTensor(groups, class_of)


@dataclass(frozen=True)
class EquationalSystem:
    category: FinCategory
    module: Module
    name: str = ""
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def truncated(self) -> bool:
        return bool(self.metadata.get("truncation"))

    def to_json(self) -> dict:
        out = {"name": self.name, "category": self.category.to_json(), "module": self.module.to_json()}
        if self.metadata:
            out["metadata"] = self.metadata
        return out


def validate_system(S: EquationalSystem) -> Report:
    """Category axioms, module axioms, then nondegeneracy."""
    for check in (lambda: validate_category(S.category), lambda: validate_module(S.module)):
        rep = check()
        if not rep.ok:
            return rep
    nd = check_module_nondegenerate(S.module)
    return Report(nd.violations, {"finite": check_module_finite(S.module)})


def hom_module(cat: FinCategory) -> Module:
    sectors = [(f, s, t) for f, (s, t) in sorted(cat.arrows.items())]
    left = {}
    right = {}
    for (g, f), h in cat.table.items():
        left[(g, f)] = h
        right[(g, f)] = h
    return Module(cat, sectors, left, right)


def hom_system(cat: FinCategory, name: str = "hom") -> EquationalSystem:
    return EquationalSystem(cat, hom_module(cat), name)


def product_category(A: FinCategory, B: FinCategory) -> FinCategory:
    objects = [tuple_id((a, b)) for a in A.objects for b in B.objects]
    if len(set(objects)) != len(objects):
        raise ValueError("product object ids collide")
    ident = {}
    arrows = []
    for f in sorted(A.arrows):
        for g in sorted(B.arrows):
            src = tuple_id((A.src(f), B.src(g)))
            tgt = tuple_id((A.tgt(f), B.tgt(g)))
            if A.is_identity(f) and B.is_identity(g):
                ident[(f, g)] = "id_" + src
            else:
                name = tuple_id((f, g))
                ident[(f, g)] = name
                arrows.append((name, src, tgt))
    compose = {}
    for (f2, f1), f3 in A.table.items():
        for (g2, g1), g3 in B.table.items():
            compose[(ident[(f2, g2)], ident[(f1, g1)])] = ident[(f3, g3)]
    return FinCategory(objects, arrows, compose)


def _arrow_pair_id(A: FinCategory, B: FinCategory, f: str, g: str) -> str:
    if A.is_identity(f) and B.is_identity(g):
        return "id_" + tuple_id((A.src(f), B.src(g)))
    return tuple_id((f, g))


def product_system(S: EquationalSystem, T: EquationalSystem) -> EquationalSystem:
    A, B = S.category, T.category
    cat = product_category(A, B)
    M, N = S.module, T.module
    sectors = []
    for m, n in product(sorted(M.sectors), sorted(N.sectors)):
        sectors.append(
            (tuple_id((m, n)), tuple_id((M.src(m), N.src(n))), tuple_id((M.tgt(m), N.tgt(n))))
        )
    left = {}
    for (f, m), fm in M.left.items():
        for (g, n), gn in N.left.items():
            left[(_arrow_pair_id(A, B, f, g), tuple_id((m, n)))] = tuple_id((fm, gn))
    right = {}
    for (m, f), mf in M.right.items():
        for (n, g), ng in N.right.items():
            right[(tuple_id((m, n)), _arrow_pair_id(A, B, f, g))] = tuple_id((mf, ng))
    meta: dict[str, Any] = {"factors": [S.name, T.name]}
    trunc = [x.metadata.get("truncation") for x in (S, T) if x.metadata.get("truncation")]
    if trunc:
        meta["truncation"] = trunc
    return EquationalSystem(cat, Module(cat, sectors, left, right), f"{S.name}×{T.name}", meta)


def terminal_system() -> EquationalSystem:
    cat = FinCategory(["*"], [], {})
    return EquationalSystem(cat, Module(cat, [("e", "*", "*")], {}, {}), "terminal")
