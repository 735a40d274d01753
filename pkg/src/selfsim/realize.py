"""Equational systems built from finite cover sequences and inverse sequences."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Any, Iterable, Mapping, Sequence

from ._support import PreconditionError, Report, Violation
from .discrete import DiscreteSystem, stream_count
from .fincat import FinCategory, SetFunctor
from .finmod import EquationalSystem, Module, tensor


@dataclass(frozen=True)
class CoverSequence:
    """Levels V₀..V_N of finite families of subsets of a finite point set.

    The empty set is an implicit member of every family, so intersections
    that come out empty never count as missing.
    """

    points: tuple[str, ...]
    levels: tuple[tuple[frozenset[str], ...], ...]

    @classmethod
    def from_lists(cls, points: Iterable[str], levels: Iterable[Iterable[Iterable[str]]]) -> "CoverSequence":
        pts = tuple(points)
        lv = []
        for family in levels:
            seen: dict[frozenset[str], None] = {}
            for member in family:
                seen.setdefault(frozenset(member), None)
            lv.append(tuple(sorted(seen, key=lambda s: _set_key(pts, s))))
        return cls(pts, tuple(lv))

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def nonempty(self, n: int) -> tuple[frozenset[str], ...]:
        return tuple(V for V in self.levels[n] if V)

    def to_json(self) -> dict:
        return {
            "points": list(self.points),
            "levels": [[self.ordered(V) for V in fam] for fam in self.levels],
        }

    def ordered(self, V: Iterable[str]) -> list[str]:
        order = {p: i for i, p in enumerate(self.points)}
        return sorted(V, key=order.__getitem__)


def _set_key(points: Sequence[str], V: frozenset[str]) -> tuple:
    order = {p: i for i, p in enumerate(points)}
    idx = sorted(order[p] for p in V if p in order)
    return (idx[0] if idx else -1, -len(idx), idx)


def _member(family: Sequence[frozenset[str]], V: frozenset[str]) -> bool:
    return not V or V in family


def validate_cover_sequence(C: CoverSequence) -> Report:
    """The four covering conditions at the given depth, plus separation info."""
    out: list[Violation] = []
    S = frozenset(C.points)
    for n, fam in enumerate(C.levels):
        for V in fam:
            if not V <= S:
                out.append(Violation("unknown point", {"level": n, "member": C.ordered(V & S) + sorted(V - S)}))
    if out:
        return Report(tuple(out))
    if not C.levels or set(C.nonempty(0)) != {S}:
        out.append(Violation("top level", {"detail": "level 0 must be the single set of all points"}))
    for n, fam in enumerate(C.levels):
        union = frozenset().union(*fam) if fam else frozenset()
        if union != S:
            out.append(Violation("not a cover", {"level": n, "missing": C.ordered(S - union)}))
    for n in range(len(C.levels) - 1):
        for W in C.nonempty(n + 1):
            if not any(W <= V for V in C.levels[n]):
                out.append(Violation("refinement", {"level": n + 1, "member": C.ordered(W)}))
    for n, fam in enumerate(C.levels):
        for V, V2 in combinations(fam, 2):
            if not _member(fam, V & V2):
                out.append(
                    Violation("intersection within level", {"level": n, "sets": [C.ordered(V), C.ordered(V2)]})
                )
    for n in range(len(C.levels) - 1):
        for V in C.levels[n]:
            for W in C.levels[n + 1]:
                if not _member(C.levels[n + 1], V & W):
                    out.append(
                        Violation(
                            "intersection across levels",
                            {"level": n, "sets": [C.ordered(V), C.ordered(W)]},
                        )
                    )
    unseparated = []
    first_level: dict[tuple[str, str], int] = {}
    for s, t in combinations(C.points, 2):
        for n, fam in enumerate(C.levels):
            if not any(s in V and t in V for V in fam):
                first_level[(s, t)] = n
                break
        else:
            unseparated.append([s, t])
    info: dict[str, Any] = {"depth": C.depth}
    if unseparated:
        info["unseparated"] = unseparated
    else:
        info["separated_by_depth"] = max(first_level.values(), default=0)
    return Report(tuple(out), info)


def _object_id(C: CoverSequence, n: int, V: frozenset[str]) -> str:
    return f"{n}:{{{','.join(C.ordered(V))}}}"


@dataclass(frozen=True)
class CoverSystem:
    system: EquationalSystem
    sets: dict[str, tuple[int, frozenset[str]]]

    def level(self, n: int) -> list[str]:
        return [o for o, (k, _) in self.sets.items() if k == n]


def build_system_from_covers(C: CoverSequence) -> CoverSystem:
    """Posetal system: objects (n, V) for nonempty V, arrows inclusions within a
    level, and one sector (n+1, W) ⇸ (n, V) whenever W ⊆ V."""
    sets: dict[str, tuple[int, frozenset[str]]] = {}
    for n in range(len(C.levels)):
        for V in C.nonempty(n):
            sets[_object_id(C, n, V)] = (n, V)
    objects = list(sets)
    arrows = []
    incl: dict[tuple[str, str], str] = {}
    for x, (n, X) in sets.items():
        for w, (k, W) in sets.items():
            if k == n and x != w and X <= W:
                name = f"{x}<{w}"
                arrows.append((name, x, w))
                incl[(x, w)] = name
    compose = {}
    for (x, w), f in incl.items():
        for (w2, v), g in incl.items():
            if w2 == w:
                compose[(g, f)] = incl[(x, v)]
    cat = FinCategory(objects, arrows, compose)

    sectors = []
    sector_of: dict[tuple[str, str], str] = {}
    for w, (k, W) in sets.items():
        for v, (n, V) in sets.items():
            if k == n + 1 and W <= V:
                name = f"{w}>{v}"
                sectors.append((name, w, v))
                sector_of[(w, v)] = name
    left = {}
    right = {}
    for (w, v), m in sector_of.items():
        for (v2, v3), f in incl.items():
            if v2 == v:
                left[(f, m)] = sector_of[(w, v3)]
        for (x, w2), g in incl.items():
            if w2 == w:
                right[(m, g)] = sector_of[(x, v)]
    module = Module(cat, sectors, left, right)
    meta = {"truncation": {"kind": "cover levels", "N": C.depth, "note": f"level {C.depth} has no refinement"}}
    return CoverSystem(EquationalSystem(cat, module, "covers", meta), sets)


def cover_functor(C: CoverSequence, built: CoverSystem) -> SetFunctor:
    """Each object (n, V) goes to the points of V, arrows to inclusions."""
    cat = built.system.category
    on_objects = {o: C.ordered(V) for o, (_, V) in built.sets.items()}
    on_arrows = {}
    for f in cat.non_identity_arrows():
        for p in on_objects[cat.src(f)]:
            on_arrows[(f, p)] = p
    return SetFunctor(cat, on_objects, on_arrows)


def verify_cover_fixed_point(C: CoverSequence, built: CoverSystem | None = None) -> Report:
    """The comparison map from the glued level n+1 pieces to each level-n set
    is a bijection, for every level below the last."""
    built = build_system_from_covers(C) if built is None else built
    J = cover_functor(C, built)
    T = tensor(built.system.module, J)
    out: list[Violation] = []
    checked = 0
    for o, (n, V) in built.sets.items():
        if n >= C.depth:
            continue
        checked += 1
        images: dict[str, str] = {}
        for group in T.classes[o]:
            pts = {x for _, x in group}
            label = T.class_of[group[0]]
            if len(pts) != 1:
                out.append(Violation("not a function", {"object": o, "class": label, "points": sorted(pts)}))
                continue
            (p,) = pts
            if p in images:
                out.append(Violation("not injective", {"object": o, "point": p, "classes": [images[p], label]}))
            images[p] = label
        missing = [p for p in C.ordered(V) if p not in images]
        if missing:
            out.append(Violation("not surjective", {"object": o, "missing": missing}))
    return Report(tuple(out), {"checked_objects": checked, "levels": C.depth})


def dyadic_covers(points: int = 17, levels: int = 5) -> CoverSequence:
    """Closed dyadic intervals and their shared endpoints, restricted to a grid.

    Level n holds the 2ⁿ intervals [i/2ⁿ, (i+1)/2ⁿ] and the 2ⁿ − 1 interior
    endpoints, each intersected with the grid {j/(points−1)}.
    """
    grid = [Fraction(j, points - 1) for j in range(points)]
    names = [_fmt(g) for g in grid]
    fams = []
    for n in range(levels + 1):
        fam = []
        k = 2**n
        for i in range(k):
            lo, hi = Fraction(i, k), Fraction(i + 1, k)
            fam.append([nm for g, nm in zip(grid, names) if lo <= g <= hi])
        for i in range(1, k):
            fam.append([nm for g, nm in zip(grid, names) if g == Fraction(i, k)])
        fams.append(fam)
    return CoverSequence.from_lists(names, fams)


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ---- inverse sequences ----


@dataclass(frozen=True)
class InverseSequence:
    """Finite sets S₁..S_N with maps ``maps[i]: sets[i+1] → sets[i]``."""

    sets: tuple[tuple[str, ...], ...]
    maps: tuple[dict[str, str], ...]

    @classmethod
    def from_lists(cls, sets: Iterable[Iterable[str]], maps: Iterable[Mapping[str, str]]) -> "InverseSequence":
        return cls(tuple(tuple(s) for s in sets), tuple(dict(m) for m in maps))

    def to_json(self) -> dict:
        return {"sets": [list(s) for s in self.sets], "maps": [dict(sorted(m.items())) for m in self.maps]}

    def project(self, level: int, t: str, down_to: int) -> str:
        """Image of ``t`` ∈ S_level in S_down_to (levels counted from 1)."""
        for k in range(level, down_to, -1):
            t = self.maps[k - 2][t]
        return t


def validate_inverse_sequence(seq: InverseSequence) -> Report:
    out: list[Violation] = []
    if len(seq.maps) != max(len(seq.sets) - 1, 0):
        out.append(Violation("map count", {"sets": len(seq.sets), "maps": len(seq.maps)}))
        return Report(tuple(out))
    for i, m in enumerate(seq.maps):
        dom, cod = seq.sets[i + 1], set(seq.sets[i])
        for t in dom:
            if t not in m:
                out.append(Violation("map not total", {"level": i + 2, "element": t}))
            elif m[t] not in cod:
                out.append(Violation("map leaves codomain", {"level": i + 2, "element": t, "image": m[t]}))
        for t in m:
            if t not in dom:
                out.append(Violation("unknown element", {"level": i + 2, "element": t}))
    return Report(tuple(out))


@dataclass(frozen=True)
class Realizability:
    system: DiscreteSystem
    objects: dict[str, tuple[int, str]]
    report: Report

    def to_json(self) -> dict:
        return {
            "system": self.system.to_json(),
            "objects": {k: list(v) for k, v in sorted(self.objects.items())},
            "check": self.report.to_json(),
        }


def _level_id(n: int, s: str) -> str:
    return f"({n},{s})"


def discrete_realizability(seq: InverseSequence) -> Realizability:
    """Objects (n, s); one sector (n+1, t) ⇸ (n, s) whenever t projects to s.

    Checks that depth-k streams ending at (n, s) are as many as the fibre of
    S_{n+k} → S_n over s, for every n + k ≤ N.
    """
    rep = validate_inverse_sequence(seq)
    if not rep.ok:
        raise PreconditionError(f"invalid inverse sequence: {rep.first()}")
    objects: dict[str, tuple[int, str]] = {}
    for n, S_n in enumerate(seq.sets, start=1):
        for s in S_n:
            objects[_level_id(n, s)] = (n, s)
    M: dict[tuple[str, str], tuple[str, ...]] = {}
    for i, m in enumerate(seq.maps):
        n = i + 1
        for t, s in m.items():
            b, a = _level_id(n + 1, t), _level_id(n, s)
            M[(b, a)] = (f"{b}>{a}",)
    N = len(seq.sets)
    D = DiscreteSystem(
        tuple(objects),
        M,
        "inverse-sequence",
        {"truncation": {"kind": "inverse sequence", "N": N, "note": f"level {N} has no successors"}},
    )
    out: list[Violation] = []
    checks = 0
    for o, (n, s) in objects.items():
        for k in range(0, N - n + 1):
            fibre = sum(1 for t in seq.sets[n + k - 1] if seq.project(n + k, t, n) == s)
            got = stream_count(D, o, k)
            checks += 1
            if got != fibre:
                out.append(Violation("fibre count", {"object": o, "depth": k, "streams": got, "fibre": fibre}))
    return Realizability(D, objects, Report(tuple(out), {"checks": checks}))


def binary_refinement(N: int) -> InverseSequence:
    """Binary words of length 1..N, each projecting to its prefix."""
    sets = [tuple(format(i, f"0{n}b") for i in range(2**n)) for n in range(1, N + 1)]
    maps = [{t: t[:-1] for t in sets[i + 1]} for i in range(N - 1)]
    return InverseSequence.from_lists(sets, maps)
