"""Truncated complex categories, their components, and equality of addresses.

A complex of length n at ``a`` is a tuple of sectors ``(m1, ..., mn)`` listed
target-first: ``m1`` lands in ``a`` and ``m(i+1)`` lands in the source of
``mi``.  A ladder from ``c`` to ``c'`` is a tuple of arrows ``(f1, ..., fn)``
with ``f(i-1)·mi = m'i·fi`` and ``f0`` the identity on ``a``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterator, Mapping, Sequence

from ._support import (
    PreconditionError,
    ResourceCapExceeded,
    UnionFind,
    default_budget,
)
from .fincat import ComponentPartition, FinCategory, roof_distance
from .finmod import EquationalSystem, Module

Complex = tuple[str, ...]
Ladder = tuple[str, ...]


def complex_id(c: Sequence[str]) -> str:
    return "<" + "|".join(c) + ">"


def factorizations(M: Module) -> dict[str, tuple[tuple[str, str], ...]]:
    """For each sector s, every (f, m) with m·f = s."""
    cat = M.base
    out: dict[str, list[tuple[str, str]]] = {s: [] for s in M.sectors}
    for m in sorted(M.sectors):
        for f in cat.arrows_into(M.src(m)):
            out[M.right[(m, f)]].append((f, m))
    return {s: tuple(sorted(v)) for s, v in out.items()}


def chain_is_valid(M: Module, a: str, chain: Sequence[str]) -> bool:
    here = a
    for m in chain:
        if m not in M.sectors or M.tgt(m) != here:
            return False
        here = M.src(m)
    return True


def chain_objects(M: Module, a: str, chain: Sequence[str]) -> list[str]:
    objs = [a]
    for m in chain:
        objs.append(M.src(m))
    return objs


def enumerate_complexes(M: Module, a: str, n: int, budget: int | None = None) -> list[Complex]:
    cap = default_budget() if budget is None else budget
    level: list[Complex] = [()]
    for _ in range(n):
        nxt: list[Complex] = []
        for c in level:
            head = M.src(c[-1]) if c else a
            for m in M.into(head):
                nxt.append(c + (m,))
                if len(nxt) > cap:
                    raise ResourceCapExceeded("truncated complex enumeration", cap)
        level = nxt
    return sorted(level)


def ladders_from(
    M: Module,
    fac: Mapping[str, Sequence[tuple[str, str]]],
    a: str,
    c: Complex,
) -> Iterator[tuple[Ladder, Complex]]:
    """Every ladder out of ``c`` with its target complex."""
    n = len(c)
    arrows: list[str] = []
    target: list[str] = []
    cat = M.base

    def go(i: int, f_prev: str) -> Iterator[tuple[Ladder, Complex]]:
        if i == n:
            yield tuple(arrows), tuple(target)
            return
        s = M.left[(f_prev, c[i])]
        for f, m in fac[s]:
            arrows.append(f)
            target.append(m)
            yield from go(i + 1, f)
            arrows.pop()
            target.pop()

    yield from go(0, cat.identity[a])


def is_ladder(M: Module, a: str, c: Sequence[str], c2: Sequence[str], arrows: Sequence[str]) -> bool:
    if not (len(c) == len(c2) == len(arrows)):
        return False
    f_prev = M.base.identity[a]
    for m, m2, f in zip(c, c2, arrows):
        if f not in M.base.arrows or M.base.tgt(f) != M.src(m2) or M.base.src(f) != M.src(m):
            return False
        if M.left[(f_prev, m)] != M.right[(m2, f)]:
            return False
        f_prev = f
    return True


@dataclass
class ComplexSpace:
    """All length-n complexes at ``a`` with every ladder between them."""

    system: EquationalSystem
    base_object: str
    depth: int
    objects: list[Complex]
    index: dict[Complex, int]
    ladders: list[list[tuple[int, Ladder]]]

    @classmethod
    def build(
        cls, S: EquationalSystem, a: str, n: int, budget: int | None = None
    ) -> "ComplexSpace":
        if n < 0:
            raise PreconditionError("depth must be nonnegative")
        if a not in S.category.identity:
            raise PreconditionError(f"unknown object {a!r}")
        cap = default_budget() if budget is None else budget
        M = S.module
        objects = enumerate_complexes(M, a, n, cap)
        index = {c: i for i, c in enumerate(objects)}
        fac = factorizations(M)
        ladders: list[list[tuple[int, Ladder]]] = []
        total = 0
        for c in objects:
            row = [(index[t], arrows) for arrows, t in ladders_from(M, fac, a, c)]
            total += len(row)
            if total > 10 * cap:
                raise ResourceCapExceeded("ladder enumeration", 10 * cap)
            ladders.append(sorted(row))
        return cls(S, a, n, objects, index, ladders)

    def __len__(self) -> int:
        return len(self.objects)

    @cached_property
    def partition(self) -> ComponentPartition[Complex]:
        uf = UnionFind(self.objects)
        for i, row in enumerate(self.ladders):
            for j, _ in row:
                uf.union(self.objects[i], self.objects[j])
        return ComponentPartition.from_union_find(uf, self.objects)

    @cached_property
    def block_index(self) -> dict[Complex, int]:
        return self.partition.block_index()

    def successors(self) -> dict[int, set[int]]:
        return {i: {j for j, _ in row} for i, row in enumerate(self.ladders)}

    def distance(self, c: Sequence[str], c2: Sequence[str]) -> float | int:
        i, j = self.index[tuple(c)], self.index[tuple(c2)]
        return roof_distance(i, j, self.successors())

    def as_category(self) -> FinCategory:
        names = [complex_id(c) for c in self.objects]
        if len(set(names)) != len(names):
            raise ValueError("complex ids collide")
        M = self.system.module
        cat = M.base
        arrow_name: dict[tuple[int, Ladder], str] = {}
        arrows = []
        lookup: dict[tuple[int, Ladder], int] = {}
        for i, row in enumerate(self.ladders):
            objs = chain_objects(M, self.base_object, self.objects[i])[1:]
            identity = tuple(cat.identity[x] for x in objs)
            for j, lad in row:
                lookup[(i, lad)] = j
                if lad == identity and i == j:
                    arrow_name[(i, lad)] = "id_" + names[i]
                else:
                    ident = names[i] + "=>" + ",".join(lad)
                    arrow_name[(i, lad)] = ident
                    arrows.append((ident, names[i], names[j]))
        compose = {}
        for i, row in enumerate(self.ladders):
            for j, lad in row:
                for k, lad2 in self.ladders[j]:
                    comp = tuple(cat.compose(g, f) for g, f in zip(lad2, lad))
                    if lookup.get((i, comp)) != k:
                        raise ValueError("ladder composite missing")
                    compose[(arrow_name[(j, lad2)], arrow_name[(i, lad)])] = arrow_name[(i, comp)]
        return FinCategory(names, arrows, compose)


def truncated_complex_category(
    S: EquationalSystem, a: str, n: int, budget: int | None = None
) -> FinCategory:
    return ComplexSpace.build(S, a, n, budget).as_category()


@dataclass
class TruncatedComponents:
    """Components of I_r(a) for every r ≤ n, with the projections between them."""

    spaces: list[ComplexSpace]

    @property
    def depth(self) -> int:
        return len(self.spaces) - 1

    @property
    def partition(self) -> ComponentPartition[Complex]:
        return self.spaces[-1].partition

    def count(self, r: int | None = None) -> int:
        return len(self.spaces[self.depth if r is None else r].partition)

    def block_of(self, c: Sequence[str]) -> int:
        return self.spaces[len(c)].block_index[tuple(c)]

    def pr(self, r: int, block: int, n: int | None = None) -> int:
        """Image of a block at depth ``n`` under truncation to depth ``r``."""
        n = self.depth if n is None else n
        rep = self.spaces[n].partition.representative[block]
        return self.spaces[r].block_index[rep[:r]]

    def projection(self, r: int, n: int | None = None) -> list[int]:
        n = self.depth if n is None else n
        return [self.pr(r, b, n) for b in range(len(self.spaces[n].partition))]

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "counts": [len(s.partition) for s in self.spaces],
            "blocks": [
                {"representative": complex_id(r), "size": len(b)}
                for r, b in zip(self.partition.representative, self.partition.blocks)
            ],
        }


def truncated_components(
    S: EquationalSystem, a: str, n: int, budget: int | None = None
) -> TruncatedComponents:
    return TruncatedComponents([ComplexSpace.build(S, a, r, budget) for r in range(n + 1)])


@dataclass(frozen=True)
class LassoComplex:
    base_object: str
    prefix: tuple[str, ...]
    cycle: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.cycle:
            raise PreconditionError("lasso cycle must be nonempty")

    def sector(self, i: int) -> str:
        p = len(self.prefix)
        if i < p:
            return self.prefix[i]
        return self.cycle[(i - p) % len(self.cycle)]

    def unroll(self, n: int) -> Complex:
        return tuple(self.sector(i) for i in range(n))

    @property
    def states(self) -> int:
        return len(self.prefix) + len(self.cycle)

    def next_state(self, s: int) -> int:
        return s + 1 if s + 1 < self.states else len(self.prefix)

    def to_json(self) -> dict:
        return {"base_object": self.base_object, "prefix": list(self.prefix), "cycle": list(self.cycle)}


def validate_lasso(M: Module, L: LassoComplex) -> list[str]:
    errs = []
    if not chain_is_valid(M, L.base_object, L.prefix):
        errs.append("prefix is not a chain at the base object")
        return errs
    head = M.src(L.prefix[-1]) if L.prefix else L.base_object
    if not chain_is_valid(M, head, L.cycle):
        errs.append("cycle does not attach to the prefix head")
    elif M.src(L.cycle[-1]) != head:
        errs.append("cycle endpoints differ")
    return errs


def unroll(L: LassoComplex, n: int) -> Complex:
    return L.unroll(n)


def distance_profile(
    S: EquationalSystem,
    a: str,
    L: LassoComplex,
    L2: LassoComplex,
    N: int,
    budget: int | None = None,
) -> list[float | int]:
    out = []
    for r in range(1, N + 1):
        space = ComplexSpace.build(S, a, r, budget)
        out.append(space.distance(L.unroll(r), L2.unroll(r)))
    return out


@dataclass(frozen=True)
class ArrowLasso:
    prefix: tuple[str, ...]
    cycle: tuple[str, ...]

    def arrow(self, i: int) -> str:
        p = len(self.prefix)
        return self.prefix[i] if i < p else self.cycle[(i - p) % len(self.cycle)]

    def unroll(self, n: int) -> Ladder:
        return tuple(self.arrow(i) for i in range(n))

    def to_json(self) -> dict:
        return {"prefix": list(self.prefix), "cycle": list(self.cycle)}


@dataclass(frozen=True)
class SpanCertificate:
    """A periodic span ``L ← apex → L2`` of ladders."""

    apex: LassoComplex
    left_leg: ArrowLasso
    right_leg: ArrowLasso

    def verify(self, M: Module, L: LassoComplex, L2: LassoComplex, depth: int) -> bool:
        a = L.base_object
        if self.apex.base_object != a or L2.base_object != a:
            return False
        if validate_lasso(M, self.apex):
            return False
        apex = self.apex.unroll(depth)
        return is_ladder(M, a, apex, L.unroll(depth), self.left_leg.unroll(depth)) and is_ladder(
            M, a, apex, L2.unroll(depth), self.right_leg.unroll(depth)
        )

    def to_json(self) -> dict:
        return {
            "apex": self.apex.to_json(),
            "left_leg": self.left_leg.to_json(),
            "right_leg": self.right_leg.to_json(),
        }


SpanState = tuple[int, int, str, str]


def _span_edges(
    M: Module,
    fac: Mapping[str, Sequence[tuple[str, str]]],
    L: LassoComplex,
    L2: LassoComplex,
    state: SpanState,
) -> list[tuple[tuple[str, str, str], SpanState]]:
    pos, pos2, f, f2 = state
    apex_obj = M.base.src(f)
    want, want2 = L.sector(pos), L2.sector(pos2)
    edges = []
    for p in M.into(apex_obj):
        s, s2 = M.left[(f, p)], M.left[(f2, p)]
        for g, m in fac[s]:
            if m != want:
                continue
            for g2, m2 in fac[s2]:
                if m2 != want2:
                    continue
                edges.append(((p, g, g2), (L.next_state(pos), L2.next_state(pos2), g, g2)))
    return sorted(edges)


def find_span(
    S: EquationalSystem, L: LassoComplex, L2: LassoComplex, budget: int | None = None
) -> SpanCertificate | None:
    """Search for a span of infinite ladders between two lasso complexes.

    The apex together with both legs is a path in a finite graph whose states
    record the current lasso positions and leg arrows.  A span exists exactly
    when an infinite path leaves the start state; any such path can be taken
    eventually periodic, so the result is again a lasso.
    """
    M = S.module
    cap = default_budget() if budget is None else budget
    fac = factorizations(M)
    a = L.base_object
    ida = M.base.identity[a]
    start: SpanState = (0, 0, ida, ida)
    graph: dict[SpanState, list[tuple[tuple[str, str, str], SpanState]]] = {}
    stack = [start]
    while stack:
        st = stack.pop()
        if st in graph:
            continue
        graph[st] = _span_edges(M, fac, L, L2, st)
        if len(graph) > cap:
            raise ResourceCapExceeded("span search", cap)
        stack.extend(t for _, t in graph[st] if t not in graph)
    live = set(graph)
    changed = True
    while changed:
        changed = False
        for st in list(live):
            if not any(t in live for _, t in graph[st]):
                live.discard(st)
                changed = True
    if start not in live:
        return None
    seen: dict[SpanState, int] = {}
    labels: list[tuple[str, str, str]] = []
    st = start
    while st not in seen:
        seen[st] = len(labels)
        label, st = next((lab, t) for lab, t in graph[st] if t in live)
        labels.append(label)
    k = seen[st]
    apex = LassoComplex(a, tuple(x[0] for x in labels[:k]), tuple(x[0] for x in labels[k:]))
    left = ArrowLasso(tuple(x[1] for x in labels[:k]), tuple(x[1] for x in labels[k:]))
    right = ArrowLasso(tuple(x[2] for x in labels[:k]), tuple(x[2] for x in labels[k:]))
    return SpanCertificate(apex, left, right)


@dataclass(frozen=True)
class EqualityVerdict:
    tag: str
    certificate: SpanCertificate | None = None
    depth: int | None = None
    profile: tuple[float | int, ...] = ()
    evidence: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        out: dict[str, Any] = {"verdict": self.tag}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        if self.depth is not None:
            out["depth"] = self.depth
        if self.profile:
            out["profile"] = ["inf" if math.isinf(d) else d for d in self.profile]
        if self.evidence:
            out["evidence"] = self.evidence
        return out


def decide_equal(
    S: EquationalSystem,
    a: str,
    L: LassoComplex,
    L2: LassoComplex,
    N: int,
    bound: int = 5,
    budget: int | None = None,
) -> EqualityVerdict:
    """Three-valued comparison of two lasso complexes at ``a``.

    Equal comes with a span certificate checked to depth ``N``.  Otherwise the
    first depth where the truncations fall in different components gives
    DistinctAtDepth.  Failing both, the verdict is Inconclusive and carries
    the distance profile, whether any profile entry passed ``bound``, and the
    outcome of the span search.
    """
    M = S.module
    for lasso in (L, L2):
        if lasso.base_object != a:
            raise PreconditionError("lasso is not based at the queried object")
        errs = validate_lasso(M, lasso)
        if errs:
            raise PreconditionError(errs[0])
    cert = find_span(S, L, L2, budget)
    if cert is not None:
        if not cert.verify(M, L, L2, N):
            raise AssertionError("span certificate failed re-verification")
        return EqualityVerdict("Equal", certificate=cert, evidence={"verified_depth": N})
    profile: list[float | int] = []
    for r in range(1, N + 1):
        space = ComplexSpace.build(S, a, r, budget)
        d = space.distance(L.unroll(r), L2.unroll(r))
        profile.append(d)
        if math.isinf(d):
            return EqualityVerdict("DistinctAtDepth", depth=r, profile=tuple(profile))
    evidence = {
        "span_exists": False,
        "exceeds_bound": any(d > bound for d in profile),
        "bound": bound,
    }
    return EqualityVerdict("Inconclusive", profile=tuple(profile), evidence=evidence)


def koenig_select(
    levels: Sequence[Sequence[str]],
    maps: Sequence[Mapping[str, str]],
    picks: Sequence[str],
) -> list[str]:
    """Choose a thread through an inverse system that is approached by ``picks``.

    ``maps[n]`` sends level n+1 to level n and ``picks[n]`` lies in level n.
    At each level the chosen value is the most frequent projection among the
    still-eligible picks, least id on ties, counting only values that extend
    to the last level and lie over the previous choice; the eligible picks
    are then restricted to those projecting onto it.
    """
    if any(len(level) == 0 for level in levels):
        raise PreconditionError("empty level")
    if len(maps) != len(levels) - 1 or len(picks) != len(levels):
        raise PreconditionError("shape mismatch")
    for n, x in enumerate(picks):
        if x not in levels[n]:
            raise PreconditionError(f"pick {n} not in its level")

    def project(x: str, n: int, r: int) -> str:
        for k in range(n - 1, r - 1, -1):
            x = maps[k][x]
        return x

    # values at each level that lie on some thread reaching the last level
    extendable = [set() for _ in levels]
    extendable[-1] = set(levels[-1])
    for r in range(len(levels) - 2, -1, -1):
        extendable[r] = {maps[r][t] for t in extendable[r + 1]}

    eligible = list(range(len(levels)))
    thread: list[str] = []
    for r in range(len(levels)):
        pool = [n for n in eligible if n >= r]
        counts = Counter(v for v in (project(picks[n], n, r) for n in pool) if v in extendable[r])
        if r > 0:
            counts = Counter({v: c for v, c in counts.items() if maps[r - 1][v] == thread[-1]})
        if counts:
            best = max(counts.values())
            y = min(v for v, c in counts.items() if c == best)
            eligible = [n for n in pool if project(picks[n], n, r) == y]
        else:
            pre = sorted(t for t in extendable[r] if maps[r - 1][t] == thread[-1])
            y = pre[0]
            eligible = []
        thread.append(y)
    return thread
