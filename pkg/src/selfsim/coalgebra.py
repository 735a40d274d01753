"""Coalgebras for ``M ⊗ −`` on finite set functors, their resolutions, and the
map into the truncated universal solution."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Mapping

from ._support import (
    PreconditionError,
    Report,
    ResourceCapExceeded,
    UnionFind,
    Violation,
    default_budget,
)
from .complexes import (
    Complex,
    ComplexSpace,
    LassoComplex,
    complex_id,
    factorizations,
    ladders_from,
    validate_lasso,
)
from .fincat import SetFunctor, check_functor_nondegenerate, validate_functor
from .finmod import EquationalSystem, TensorResult, class_label, tensor
from .solvability import check_S


@dataclass(frozen=True, eq=False)
class Coalgebra:
    """``xi[(a, x)] = (m, y)`` picks one representative of the class ξ(x).

    Elements listed in ``boundary`` carry no structure; they mark the cut-off
    of a truncated coalgebra.
    """

    system: EquationalSystem
    carrier: SetFunctor
    xi: dict[tuple[str, str], tuple[str, str]]
    boundary: frozenset[tuple[str, str]] = frozenset()
    name: str = ""

    @cached_property
    def tensor(self) -> TensorResult:
        return tensor(self.system.module, self.carrier)

    @cached_property
    def _members(self) -> dict[str, tuple[tuple[str, str], ...]]:
        out = {}
        for a, classes in self.tensor.classes.items():
            for cls in classes:
                out[class_label(*cls[0])] = cls
        return out

    def structure_class(self, a: str, x: str) -> str:
        m, y = self.xi[(a, x)]
        return self.tensor.class_of[(m, y)]

    def representatives(self, a: str, x: str) -> tuple[tuple[str, str], ...]:
        """Every pair (m, y) whose class is ξ(x)."""
        return self._members[self.structure_class(a, x)]

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "carrier": self.carrier.to_json(),
            "xi": {f"{a}|{x}": list(v) for (a, x), v in sorted(self.xi.items())},
        }
        if self.boundary:
            out["boundary"] = [list(b) for b in sorted(self.boundary)]
        return out


def validate_coalgebra(C: Coalgebra, *, require_nondegenerate: bool = True) -> Report:
    M = C.system.module
    cat = C.system.category
    X = C.carrier
    rep = validate_functor(X)
    if not rep.ok:
        return rep
    out: list[Violation] = []
    for a, x in X.elements():
        if (a, x) in C.boundary:
            continue
        pair = C.xi.get((a, x))
        if pair is None:
            out.append(Violation("missing structure", {"object": a, "element": x}))
            continue
        m, y = pair
        if m not in M.sectors or M.tgt(m) != a:
            out.append(Violation("bad sector", {"object": a, "element": x, "sector": m}))
        elif y not in X(M.src(m)):
            out.append(Violation("bad element", {"object": a, "element": x, "value": y}))
    if out:
        return Report(tuple(out))
    T = C.tensor
    for f in cat.non_identity_arrows():
        a = cat.src(f)
        for x in X(a):
            fx = X.act(f, x)
            if (a, x) in C.boundary or (cat.tgt(f), fx) in C.boundary:
                continue
            m, y = C.xi[(a, x)]
            lhs = T.class_of[(M.left[(f, m)], y)]
            rhs = C.structure_class(cat.tgt(f), fx)
            if lhs != rhs:
                out.append(Violation("naturality", {"arrow": f, "element": x}))
    if out:
        return Report(tuple(out))
    if require_nondegenerate:
        nd = check_functor_nondegenerate(X)
        if not nd.ok:
            return Report(tuple(Violation("carrier " + v.kind, v.detail) for v in nd.violations))
    return Report()


@dataclass(frozen=True, order=True)
class Resolution:
    complex: Complex
    elements: tuple[str, ...]

    @property
    def depth(self) -> int:
        return len(self.complex)

    def to_json(self) -> dict:
        return {"complex": list(self.complex), "elements": list(self.elements)}


def resolutions(
    C: Coalgebra, a: str, x: str, n: int, budget: int | None = None
) -> list[Resolution]:
    cap = default_budget() if budget is None else budget
    M = C.system.module
    level: list[tuple[tuple[str, ...], tuple[str, ...], str]] = [((), (x,), a)]
    for _ in range(n):
        nxt = []
        for chain, elts, obj in level:
            here = elts[-1]
            if (obj, here) in C.boundary:
                continue
            for m, y in C.representatives(obj, here):
                nxt.append((chain + (m,), elts + (y,), M.src(m)))
                if len(nxt) > cap:
                    raise ResourceCapExceeded("resolution enumeration", cap)
        level = nxt
    return sorted(Resolution(c, e) for c, e, _ in level)


def _reso_ladders(
    C: Coalgebra, a: str, resos: list[Resolution]
) -> list[set[int]]:
    M = C.system.module
    X = C.carrier
    fac = factorizations(M)
    index = {(r.complex, r.elements): i for i, r in enumerate(resos)}
    out: list[set[int]] = []
    for r in resos:
        targets = set()
        for arrows, target in ladders_from(M, fac, a, r.complex):
            elts = (r.elements[0],) + tuple(
                X.act(f, e) for f, e in zip(arrows, r.elements[1:])
            )
            j = index.get((target, elts))
            if j is not None:
                targets.add(j)
        out.append(targets)
    return out


def check_reso_connected(
    C: Coalgebra, a: str, x: str, n: int, budget: int | None = None
) -> Report:
    """The depth-n resolutions of ``x`` form one component and every pair of
    them is joined by a span of ladders."""
    resos = resolutions(C, a, x, n, budget)
    if not resos:
        return Report((Violation("no resolution", {"object": a, "element": x, "depth": n}),))
    succ = _reso_ladders(C, a, resos)
    uf = UnionFind(range(len(resos)))
    for i, ts in enumerate(succ):
        for j in ts:
            uf.union(i, j)
    classes = uf.classes()
    info = {"resolutions": len(resos), "components": len(classes)}
    if len(classes) > 1:
        i, j = classes[0][0], classes[1][0]
        return Report(
            (Violation("disconnected", {"pair": [resos[i].to_json(), resos[j].to_json()]}),), info
        )
    spanned: set[tuple[int, int]] = set()
    for ts in succ:
        for i, j in combinations(sorted(ts), 2):
            spanned.add((i, j))
    for i, j in combinations(range(len(resos)), 2):
        if (i, j) not in spanned:
            return Report(
                (Violation("no span", {"pair": [resos[i].to_json(), resos[j].to_json()]}),), info
            )
    return Report((), info)


@dataclass(frozen=True)
class TerminalImage:
    depth: int
    block: int
    representative: Complex
    resolutions: int

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "block": self.block,
            "representative": complex_id(self.representative),
            "sectors": list(self.representative),
            "resolutions": self.resolutions,
        }


def terminal_map(
    C: Coalgebra,
    a: str,
    x: str,
    n: int,
    *,
    assume_solvable: bool = False,
    space: ComplexSpace | None = None,
    budget: int | None = None,
) -> TerminalImage:
    """The component of I_n(a) containing the complexes of the resolutions of ``x``."""
    S = C.system
    if not assume_solvable and check_S(S, respect_truncation=False).tag != "Holds":
        raise PreconditionError("solvability condition does not hold")
    resos = resolutions(C, a, x, n, budget)
    if not resos:
        raise PreconditionError(f"no depth-{n} resolution of {x!r}")
    if space is None:
        space = ComplexSpace.build(S, a, n, budget)
    blocks = {space.block_index[r.complex] for r in resos}
    if len(blocks) != 1:
        raise AssertionError("resolutions of one element landed in different components")
    (b,) = blocks
    return TerminalImage(n, b, space.partition.representative[b], len(resos))


@dataclass(frozen=True)
class FixedPoint:
    coalgebra: Coalgebra
    psi: dict[str, dict[str, str]]
    unoccupied: bool

    def to_json(self) -> dict:
        return {
            "psi": {m: dict(sorted(t.items())) for m, t in sorted(self.psi.items())},
            "unoccupied": self.unoccupied,
        }


@dataclass(frozen=True)
class FixedPointFailure:
    witness: Violation

    def to_json(self) -> dict:
        return {"failure": self.witness.to_json()}


def check_fixed_point(C: Coalgebra) -> FixedPoint | FixedPointFailure:
    """Is the structure map a bijection onto the tensor classes at every object?"""
    M = C.system.module
    cat = C.system.category
    X = C.carrier
    T = C.tensor
    inverse: dict[str, str] = {}
    for a in cat.objects:
        for x in X(a):
            cid = C.structure_class(a, x)
            if cid in inverse:
                return FixedPointFailure(
                    Violation("not injective", {"object": a, "elements": [inverse[cid], x]})
                )
            inverse[cid] = x
        for cls in T.classes[a]:
            cid = class_label(*cls[0])
            if cid not in inverse:
                return FixedPointFailure(Violation("not surjective", {"object": a, "class": cid}))
    psi: dict[str, dict[str, str]] = {}
    for m, (b, a) in sorted(M.sectors.items()):
        psi[m] = {y: inverse[T.class_of[(m, y)]] for y in X(b)}
    for m, (b, a) in sorted(M.sectors.items()):
        for f in cat.arrows_from(a):
            for g in cat.arrows_into(b):
                fmg = M.right[(M.left[(f, m)], g)]
                for y in X(cat.src(g)):
                    if psi[fmg][y] != X.act(f, psi[m][X.act(g, y)]):
                        return FixedPointFailure(
                            Violation("psi naturality", {"arrows": [f, g], "sector": m, "element": y})
                        )
    return FixedPoint(C, psi, X.size() == 0)


def truncated_solution_functor(
    S: EquationalSystem, n: int, budget: int | None = None
) -> tuple[SetFunctor, dict[str, ComplexSpace]]:
    """The functor a ↦ components of I_n(a), labelled by representative ids."""
    cat = S.category
    M = S.module
    spaces = {a: ComplexSpace.build(S, a, n, budget) for a in cat.objects}
    label = {
        a: [complex_id(r) for r in sp.partition.representative] for a, sp in spaces.items()
    }
    on_objects = {a: tuple(label[a]) for a in cat.objects}
    on_arrows = {}
    for f in cat.non_identity_arrows():
        a, a2 = cat.arrows[f]
        for i, rep in enumerate(spaces[a].partition.representative):
            moved = (M.left[(f, rep[0])],) + rep[1:] if rep else ()
            on_arrows[(f, label[a][i])] = label[a2][spaces[a2].block_index[moved]]
    return SetFunctor(cat, on_objects, on_arrows), spaces


def check_truncated_fixed_point(
    S: EquationalSystem, a: str, n: int, budget: int | None = None
) -> Report:
    """Is [m1, ..., m(n+1)] ↦ m1 ⊗ [m2, ..., m(n+1)] a bijection I_(n+1)(a) → (M ⊗ I_n)(a)?"""
    X, spaces = truncated_solution_functor(S, n, budget)
    T = tensor(S.module, X)
    top = ComplexSpace.build(S, a, n + 1, budget)
    image: dict[int, str] = {}
    for c in top.objects:
        tail = c[1:]
        b = S.module.src(c[0])
        label = complex_id(spaces[b].partition.representative[spaces[b].block_index[tail]])
        cid = T.class_of[(c[0], label)]
        blk = top.block_index[c]
        if image.setdefault(blk, cid) != cid:
            return Report((Violation("not well defined", {"block": blk}),))
    values = list(image.values())
    if len(set(values)) != len(values):
        return Report((Violation("not injective", {"object": a}),))
    if len(set(values)) != len(T.classes[a]):
        return Report((Violation("not surjective", {"object": a}),))
    return Report((), {"size": len(values)})


@dataclass(frozen=True)
class RepresentableCoalgebra:
    coalgebra: Coalgebra
    lasso: LassoComplex
    depth: int
    kappa: dict[tuple[str, str], Complex]

    def to_json(self) -> dict:
        return {
            "coalgebra": self.coalgebra.to_json(),
            "kappa": {f"{a}|{x}": list(c) for (a, x), c in sorted(self.kappa.items())},
        }


def _rep_element(n: int, h: str) -> str:
    return f"({n}:{h})"


def representable_coalgebra(S: EquationalSystem, L: LassoComplex, N: int) -> RepresentableCoalgebra:
    """Carrier Σ_{n ≤ N} A(a_n, −) with 1_{a_n} ↦ m_{n+1} ⊗ 1_{a_(n+1)}.

    ``kappa`` sends each element to the complex read off from its unique
    resolution, truncated where the carrier stops.
    """
    M = S.module
    cat = S.category
    errs = validate_lasso(M, L)
    if errs:
        raise PreconditionError(errs[0])
    chain = L.unroll(N)
    objs = [L.base_object] + [M.src(m) for m in chain]
    on_objects: dict[str, list[str]] = {c: [] for c in cat.objects}
    on_arrows: dict[tuple[str, str], str] = {}
    xi: dict[tuple[str, str], tuple[str, str]] = {}
    kappa: dict[tuple[str, str], Complex] = {}
    boundary = set()
    for n, an in enumerate(objs):
        for h in cat.arrows_from(an):
            c = cat.tgt(h)
            e = _rep_element(n, h)
            on_objects[c].append(e)
            for f in cat.arrows_from(c):
                if not cat.is_identity(f):
                    on_arrows[(f, e)] = _rep_element(n, cat.compose(f, h))
            if n < N:
                xi[(c, e)] = (M.left[(h, chain[n])], _rep_element(n + 1, cat.identity[objs[n + 1]]))
                kappa[(c, e)] = (M.left[(h, chain[n])],) + chain[n + 1 :]
            else:
                boundary.add((c, e))
                kappa[(c, e)] = ()
    X = SetFunctor(cat, {c: sorted(v) for c, v in on_objects.items()}, on_arrows)
    C = Coalgebra(S, X, xi, frozenset(boundary), f"representable({complex_id(chain)})")
    return RepresentableCoalgebra(C, L, N, kappa)


def coalgebra_from_tables(
    S: EquationalSystem,
    on_objects: Mapping[str, list[str]],
    on_arrows: Mapping[tuple[str, str], str],
    xi: Mapping[tuple[str, str], tuple[str, str]],
    name: str = "",
) -> Coalgebra:
    return Coalgebra(S, SetFunctor(S.category, on_objects, on_arrows), dict(xi), frozenset(), name)


def coalgebra_morphism_check(
    C: Coalgebra, D: Coalgebra, h: Mapping[tuple[str, str], str]
) -> Report:
    """Naturality of ``h`` and compatibility with both structure maps."""
    cat = C.system.category
    M = C.system.module
    out: list[Violation] = []
    for f in cat.non_identity_arrows():
        for x in C.carrier(cat.src(f)):
            if h[(cat.tgt(f), C.carrier.act(f, x))] != D.carrier.act(f, h[(cat.src(f), x)]):
                out.append(Violation("naturality", {"arrow": f, "element": x}))
    for (a, x), (m, y) in sorted(C.xi.items()):
        if (a, h[(a, x)]) in D.boundary:
            continue
        lhs = D.tensor.class_of[(m, h[(M.src(m), y)])]
        rhs = D.structure_class(a, h[(a, x)])
        if lhs != rhs:
            out.append(Violation("structure", {"object": a, "element": x}))
    return Report(tuple(out))


__all__ = [
    "Coalgebra",
    "FixedPoint",
    "FixedPointFailure",
    "RepresentableCoalgebra",
    "Resolution",
    "TerminalImage",
    "check_fixed_point",
    "check_reso_connected",
    "check_truncated_fixed_point",
    "coalgebra_from_tables",
    "coalgebra_morphism_check",
    "representable_coalgebra",
    "resolutions",
    "terminal_map",
    "truncated_solution_functor",
    "validate_coalgebra",
]
