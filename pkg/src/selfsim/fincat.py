"""Finite categories given by composition tables, and functors into finite sets."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Generic, Hashable, Iterable, Mapping, Sequence, TypeVar

from ._support import PreconditionError, Report, UnionFind, Violation, tuple_id

IDENTITY_PREFIX = "id_"

T = TypeVar("T", bound=Hashable)


def identity_id(obj: str) -> str:
    return IDENTITY_PREFIX + obj


class CategoryError(ValueError):
    pass


class FinCategory:
    """An explicit finite category.

    ``table`` maps ``(g, f)`` to the composite ``g∘f``. Identities are
    synthesized as ``id_<object>`` and their composites filled in unless the
    caller supplied an entry for that pair.
    """

    __slots__ = ("objects", "arrows", "identity", "table", "_hom", "_out", "_in", "_identities")

    def __init__(
        self,
        objects: Iterable[str],
        arrows: Iterable[tuple[str, str, str]],
        compose: Mapping[tuple[str, str], str] | None = None,
    ) -> None:
        objs = tuple(dict.fromkeys(objects))
        if len(set(objs)) != len(objs):
            raise CategoryError("duplicate object ids")
        objset = set(objs)
        arrow_map: dict[str, tuple[str, str]] = {}
        for ident, src, tgt in arrows:
            if ident.startswith(IDENTITY_PREFIX):
                raise CategoryError(f"arrow id {ident!r} uses the reserved prefix {IDENTITY_PREFIX!r}")
            if ident in arrow_map:
                raise CategoryError(f"duplicate arrow id {ident!r}")
            if src not in objset or tgt not in objset:
                raise CategoryError(f"arrow {ident!r} has unknown endpoint")
            arrow_map[ident] = (src, tgt)
        identity = {a: identity_id(a) for a in objs}
        for a, i in identity.items():
            if i in arrow_map:
                raise CategoryError(f"identity id clash for {a!r}")
            arrow_map[i] = (a, a)
        table = dict(compose or {})
        for f, (src, tgt) in arrow_map.items():
            table.setdefault((identity[tgt], f), f)
            table.setdefault((f, identity[src]), f)
        self.objects = objs
        self.arrows = arrow_map
        self.identity = identity
        self.table = table
        self._identities = frozenset(identity.values())
        hom: dict[tuple[str, str], list[str]] = {}
        out: dict[str, list[str]] = {a: [] for a in objs}
        inc: dict[str, list[str]] = {a: [] for a in objs}
        for f in sorted(arrow_map):
            src, tgt = arrow_map[f]
            hom.setdefault((src, tgt), []).append(f)
            out[src].append(f)
            inc[tgt].append(f)
        self._hom = {k: tuple(v) for k, v in hom.items()}
        self._out = {k: tuple(v) for k, v in out.items()}
        self._in = {k: tuple(v) for k, v in inc.items()}

    def src(self, f: str) -> str:
        return self.arrows[f][0]

    def tgt(self, f: str) -> str:
        return self.arrows[f][1]

    def is_identity(self, f: str) -> bool:
        return f in self._identities

    def hom(self, a: str, b: str) -> tuple[str, ...]:
        return self._hom.get((a, b), ())

    def arrows_from(self, a: str) -> tuple[str, ...]:
        return self._out[a]

    def arrows_into(self, b: str) -> tuple[str, ...]:
        return self._in[b]

    def compose(self, g: str, f: str) -> str:
        try:
            return self.table[(g, f)]
        except KeyError:
            raise CategoryError(f"no composite recorded for {g}∘{f}") from None

    def non_identity_arrows(self) -> list[str]:
        return sorted(f for f in self.arrows if f not in self._identities)

    def is_discrete(self) -> bool:
        return len(self.arrows) == len(self.objects)

    def __repr__(self) -> str:
        return f"FinCategory({len(self.objects)} objects, {len(self.arrows)} arrows)"

    def to_json(self) -> dict:
        arrows = [
            {"id": f, "src": self.arrows[f][0], "tgt": self.arrows[f][1]}
            for f in self.non_identity_arrows()
        ]
        compose = {
            f"{g}|{f}": h
            for (g, f), h in sorted(self.table.items())
            if not (self.is_identity(g) or self.is_identity(f))
        }
        return {"objects": list(self.objects), "arrows": arrows, "compose": compose}


def discrete_category(objects: Iterable[str]) -> FinCategory:
    return FinCategory(objects, [], {})


def opposite(cat: FinCategory) -> FinCategory:
    """The opposite category; arrow ids are kept, composition reversed."""
    arrows = [(f, cat.tgt(f), cat.src(f)) for f in cat.non_identity_arrows()]
    compose = {}
    for (g, f), h in cat.table.items():
        if cat.is_identity(g) or cat.is_identity(f):
            continue
        compose[(f, g)] = h
    return FinCategory(cat.objects, arrows, compose)


def validate_category(cat: FinCategory) -> Report:
    out: list[Violation] = []
    arrows = sorted(cat.arrows)
    for (g, f), h in sorted(cat.table.items()):
        if g not in cat.arrows or f not in cat.arrows or h not in cat.arrows:
            out.append(Violation("unknown arrow", {"pair": [g, f], "composite": h}))
            continue
        if cat.src(g) != cat.tgt(f):
            out.append(Violation("non-composable entry", {"pair": [g, f]}))
            continue
        if cat.src(h) != cat.src(f) or cat.tgt(h) != cat.tgt(g):
            out.append(Violation("composite typing", {"pair": [g, f], "composite": h}))
    if out:
        return Report(tuple(out))
    for g, f in product(arrows, arrows):
        if cat.src(g) == cat.tgt(f) and (g, f) not in cat.table:
            out.append(Violation("missing composite", {"pair": [g, f]}))
    if out:
        return Report(tuple(out))
    for f in arrows:
        s, t = cat.arrows[f]
        if cat.table[(cat.identity[t], f)] != f or cat.table[(f, cat.identity[s])] != f:
            out.append(Violation("identity law", {"arrow": f}))
    for h, g, f in product(arrows, arrows, arrows):
        if cat.src(h) == cat.tgt(g) and cat.src(g) == cat.tgt(f):
            left = cat.table[(h, cat.table[(g, f)])]
            right = cat.table[(cat.table[(h, g)], f)]
            if left != right:
                out.append(Violation("associativity", {"triple": [h, g, f], "values": [left, right]}))
    return Report(tuple(out))


@dataclass(frozen=True)
class ComponentPartition(Generic[T]):
    blocks: tuple[tuple[T, ...], ...]
    representative: tuple[T, ...]

    @classmethod
    def from_union_find(cls, uf: UnionFind, items: Iterable[T]) -> "ComponentPartition[T]":
        groups: dict[T, list[T]] = {}
        for item in items:
            groups.setdefault(uf.canonical(item), []).append(item)
        blocks = tuple(tuple(sorted(g)) for _, g in sorted(groups.items()))
        return cls(blocks, tuple(b[0] for b in blocks))

    def block_index(self) -> dict[T, int]:
        return {x: i for i, block in enumerate(self.blocks) for x in block}

    def block_of(self, item: T) -> int:
        for i, block in enumerate(self.blocks):
            if item in block:
                return i
        raise KeyError(item)

    def __len__(self) -> int:
        return len(self.blocks)

    def to_json(self) -> dict:
        return {
            "count": len(self.blocks),
            "blocks": [{"representative": r, "size": len(b)} for r, b in zip(self.representative, self.blocks)],
        }


def connected_components(cat: FinCategory) -> ComponentPartition[str]:
    uf = UnionFind(cat.objects)
    for f, (s, t) in cat.arrows.items():
        uf.union(s, t)
    return ComponentPartition.from_union_find(uf, cat.objects)


def roof_distance(
    source: T,
    target: T,
    successors: Mapping[T, Iterable[T]],
) -> float | int:
    """Least number of roofs ``· ← B → ·`` joining ``source`` to ``target``.

    ``successors[x]`` lists the objects reachable from ``x`` by one arrow;
    identities are implied.
    """
    if source == target:
        return 0
    preds: dict[T, set[T]] = {}
    for x, ys in successors.items():
        preds.setdefault(x, {x})
        for y in ys:
            preds.setdefault(y, {y}).add(x)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        here = queue.popleft()
        for apex in preds.get(here, (here,)):
            for nxt in (apex, *successors.get(apex, ())):
                if nxt not in dist:
                    dist[nxt] = dist[here] + 1
                    if nxt == target:
                        return dist[nxt]
                    queue.append(nxt)
    return math.inf


def _successor_map(cat: FinCategory) -> dict[str, set[str]]:
    succ: dict[str, set[str]] = {a: set() for a in cat.objects}
    for s, t in cat.arrows.values():
        succ[s].add(t)
    return succ


def zigzag_distance(cat: FinCategory, a: str, b: str) -> float | int:
    return roof_distance(a, b, _successor_map(cat))


def check_componentwise_filtered(cat: FinCategory, *, cofiltered: bool = False) -> Report:
    """Every span closes to a commuting square and every parallel pair has a cofork.

    With ``cofiltered`` the dual conditions are checked (cospans and forks).
    """
    work = opposite(cat) if cofiltered else cat
    arrows = sorted(work.arrows)
    for f, f2 in product(arrows, arrows):
        if f >= f2 or work.src(f) != work.src(f2):
            continue
        b, b2 = work.tgt(f), work.tgt(f2)
        if b == b2:
            ok = any(
                work.compose(h, f) == work.compose(h, f2) for h in work.arrows_from(b)
            )
            if not ok:
                kind = "parallel pair without fork" if cofiltered else "parallel pair without cofork"
                return Report((Violation(kind, {"pair": [f, f2]}),))
        else:
            ok = any(
                work.compose(h, f) == work.compose(h2, f2)
                for h in work.arrows_from(b)
                for h2 in work.arrows_from(b2)
                if work.tgt(h) == work.tgt(h2)
            )
            if not ok:
                kind = "cospan without square" if cofiltered else "span without square"
                return Report((Violation(kind, {"pair": [f, f2]}),))
    return Report()


def split_idempotents_check(cat: FinCategory) -> Report:
    out = []
    for e in sorted(cat.arrows):
        s, t = cat.arrows[e]
        if s != t or cat.compose(e, e) != e or cat.is_identity(e):
            continue
        split = any(
            cat.compose(p, i) == cat.identity[cat.src(i)] and cat.compose(i, p) == e
            for i in cat.arrows_into(s)
            for p in cat.hom(s, cat.src(i))
        )
        if not split:
            out.append(Violation("non-split idempotent", {"arrow": e}))
    return Report(tuple(out))


def initial_object_per_component(cat: FinCategory) -> dict[str, str | None]:
    parts = connected_components(cat)
    result: dict[str, str | None] = {}
    for rep, block in zip(parts.representative, parts.blocks):
        found = None
        for cand in block:
            if all(len(cat.hom(cand, other)) == 1 for other in block):
                found = cand
                break
        result[rep] = found
    return result


class SetFunctor:
    """A functor from a finite category to finite sets."""

    __slots__ = ("base", "on_objects", "on_arrows")

    def __init__(
        self,
        base: FinCategory,
        on_objects: Mapping[str, Sequence[str]],
        on_arrows: Mapping[tuple[str, str], str],
    ) -> None:
        self.base = base
        self.on_objects = {a: tuple(on_objects.get(a, ())) for a in base.objects}
        self.on_arrows = dict(on_arrows)

    def __call__(self, a: str) -> tuple[str, ...]:
        return self.on_objects[a]

    def act(self, f: str, x: str) -> str:
        if self.base.is_identity(f):
            return x
        return self.on_arrows[(f, x)]

    def elements(self) -> list[tuple[str, str]]:
        return [(a, x) for a in self.base.objects for x in self.on_objects[a]]

    def size(self) -> int:
        return sum(len(v) for v in self.on_objects.values())

    def to_json(self) -> dict:
        return {
            "on_objects": {a: list(xs) for a, xs in self.on_objects.items()},
            "on_arrows": {f"{f}|{x}": y for (f, x), y in sorted(self.on_arrows.items())},
        }


def representable(cat: FinCategory, a: str) -> SetFunctor:
    """The covariant hom functor A(a, −)."""
    on_objects = {b: cat.hom(a, b) for b in cat.objects}
    on_arrows = {}
    for f in cat.non_identity_arrows():
        for h in cat.hom(a, cat.src(f)):
            on_arrows[(f, h)] = cat.compose(f, h)
    return SetFunctor(cat, on_objects, on_arrows)


def validate_functor(X: SetFunctor) -> Report:
    cat = X.base
    out: list[Violation] = []
    for a, xs in X.on_objects.items():
        if len(set(xs)) != len(xs):
            out.append(Violation("duplicate element", {"object": a}))
    for f in cat.non_identity_arrows():
        s, t = cat.arrows[f]
        fiber = set(X(t))
        for x in X(s):
            y = X.on_arrows.get((f, x))
            if y is None:
                out.append(Violation("missing action", {"arrow": f, "element": x}))
            elif y not in fiber:
                out.append(Violation("action leaves fiber", {"arrow": f, "element": x, "value": y}))
    for (f, x) in X.on_arrows:
        if f not in cat.arrows or x not in X(cat.src(f)):
            out.append(Violation("stray action entry", {"arrow": f, "element": x}))
    if out:
        return Report(tuple(out))
    for (g, f), h in sorted(cat.table.items()):
        for x in X(cat.src(f)):
            if X.act(g, X.act(f, x)) != X.act(h, x):
                out.append(Violation("composition", {"pair": [g, f], "element": x}))
    return Report(tuple(out))


@dataclass(frozen=True)
class ElementsCategory:
    category: FinCategory
    element_of: dict[str, tuple[str, str]]
    arrow_projection: dict[str, str]

    def object_projection(self) -> dict[str, str]:
        return {o: ax[0] for o, ax in self.element_of.items()}


def element_id(a: str, x: str) -> str:
    return tuple_id((a, x))


def category_of_elements(X: SetFunctor) -> ElementsCategory:
    cat = X.base
    element_of = {element_id(a, x): (a, x) for a, x in X.elements()}
    if len(element_of) != len(X.elements()):
        raise CategoryError("element ids collide")
    arrows = []
    arrow_projection: dict[str, str] = {}
    for f in cat.non_identity_arrows():
        for x in X(cat.src(f)):
            ident = tuple_id((f, x))
            arrows.append((ident, element_id(cat.src(f), x), element_id(cat.tgt(f), X.act(f, x))))
            arrow_projection[ident] = f
    compose = {}
    for (g, f), h in cat.table.items():
        if cat.is_identity(g) or cat.is_identity(f):
            continue
        for x in X(cat.src(f)):
            fx = X.act(f, x)
            if cat.is_identity(h):
                value = identity_id(element_id(cat.src(f), x))
            else:
                value = tuple_id((h, x))
            compose[(tuple_id((g, fx)), tuple_id((f, x)))] = value
    elt = FinCategory(sorted(element_of), arrows, compose)
    for o, (a, _) in element_of.items():
        arrow_projection[elt.identity[o]] = cat.identity[a]
    return ElementsCategory(elt, element_of, arrow_projection)


def _preimage_index(X: SetFunctor) -> dict[tuple[str, str], dict[tuple[str, str], list[str]]]:
    """For each element (a, x): the elements (c, z) with arrows g: c → a, g z = x."""
    cat = X.base
    index: dict[tuple[str, str], dict[tuple[str, str], list[str]]] = {
        ax: {} for ax in X.elements()
    }
    for g in sorted(cat.arrows):
        c, a = cat.arrows[g]
        for z in X(c):
            index[(a, X.act(g, z))].setdefault((c, z), []).append(g)
    return index


def check_functor_nondegenerate(X: SetFunctor) -> Report:
    """Exhaustive search for square (ND1) and fork (ND2) completions."""
    cat = X.base
    pre = _preimage_index(X)
    for b in cat.objects:
        incoming = cat.arrows_into(b)
        for f, f2 in product(incoming, incoming):
            a, a2 = cat.src(f), cat.src(f2)
            for x in X(a):
                fx = X.act(f, x)
                for x2 in X(a2):
                    if (a, x) > (a2, x2) or X.act(f2, x2) != fx:
                        continue
                    if (a, x) == (a2, x2):
                        if f >= f2:
                            continue
                        ok = any(
                            cat.compose(f, g) == cat.compose(f2, g)
                            for gs in pre[(a, x)].values()
                            for g in gs
                        )
                        if not ok:
                            return Report((Violation("ND2", {"arrows": [f, f2], "element": [a, x]}),))
                        continue
                    left = pre[(a, x)]
                    right = pre[(a2, x2)]
                    ok = any(
                        cat.compose(f, g) == cat.compose(f2, g2)
                        for cz, gs in left.items()
                        if cz in right
                        for g in gs
                        for g2 in right[cz]
                    )
                    if not ok:
                        return Report(
                            (
                                Violation(
                                    "ND1",
                                    {"arrows": [f, f2], "elements": [[a, x], [a2, x2]], "target": b},
                                ),
                            )
                        )
    return Report()


@dataclass(frozen=True)
class Decomposition:
    ok: bool
    multiplicity: dict[str, int]
    generators: tuple[tuple[str, str], ...] = ()
    witness: Violation | None = None

    def to_json(self) -> dict:
        out = {
            "ok": self.ok,
            "multiplicity": dict(sorted(self.multiplicity.items())),
            "generators": [list(g) for g in self.generators],
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def decompose_into_representables(X: SetFunctor) -> Decomposition:
    cat = X.base
    if not split_idempotents_check(cat).ok:
        raise PreconditionError("base category is not Cauchy-complete")
    nd = check_functor_nondegenerate(X)
    if not nd.ok:
        return Decomposition(False, {}, (), nd.first())
    elts = category_of_elements(X)
    initial = initial_object_per_component(elts.category)
    multiplicity: dict[str, int] = {}
    generators = []
    for rep, obj in sorted(initial.items()):
        if obj is None:
            return Decomposition(False, {}, (), Violation("component without initial object", {"component": rep}))
        a, x = elts.element_of[obj]
        multiplicity[a] = multiplicity.get(a, 0) + 1
        generators.append((a, x))
    covered = {}
    for a, x in generators:
        for c in cat.objects:
            for h in cat.hom(a, c):
                key = (c, X.act(h, x))
                if key in covered:
                    return Decomposition(False, {}, (), Violation("overlapping generators", {"element": list(key)}))
                covered[key] = (a, x, h)
    if len(covered) != len(X.elements()):
        return Decomposition(False, {}, (), Violation("generators miss elements", {}))
    return Decomposition(True, multiplicity, tuple(generators))
