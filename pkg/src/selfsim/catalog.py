"""Built-in example systems, their realizations, coalgebras and expected values."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from itertools import product as cartesian
from typing import Any, Callable, Mapping, Sequence

from ._geometry import AffineMap
from ._support import PreconditionError, tuple_id
from .coalgebra import Coalgebra, coalgebra_from_tables, representable_coalgebra
from .complexes import LassoComplex
from .discrete import DiscreteSystem, walks_counts
from .fincat import FinCategory
from .finmod import EquationalSystem, Module, product_system
from .recognition import Domain, GeometricRealization, ParametricMap

F = Fraction


@dataclass(frozen=True)
class Expectation:
    """An expected value and how it is known: stated in the literature for the
    example, derived by an independent computation, or true by construction."""

    value: Any
    basis: str

    def to_json(self) -> dict:
        return {"value": self.value, "basis": self.basis}


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: dict[str, Any]
    system: EquationalSystem
    realization: GeometricRealization | None = None
    expected: dict[str, Expectation] = field(default_factory=dict)
    discrete: DiscreteSystem | None = None
    notes: str = ""

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "name": self.system.name,
            "category": self.system.category.to_json(),
            "module": self.system.module.to_json(),
        }
        if self.realization is not None:
            out["realization"] = self.realization.to_json()
        if self.system.metadata:
            out["metadata"] = self.system.metadata
        if self.notes:
            out["notes"] = self.notes
        return out


def _frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _affine(A: Sequence[Sequence[Any]], b: Sequence[Any]) -> AffineMap:
    return AffineMap([[F(x) for x in row] for row in A], [F(x) for x in b])


def _const(point: Sequence[Any], source_dim: int) -> AffineMap:
    return AffineMap([[F(0)] * source_dim for _ in point], [F(x) for x in point])


# ---- discrete entries ----


def cantor(k: int = 2) -> CatalogEntry:
    """One space equal to k copies of itself."""
    if not 2 <= k <= 16:
        raise PreconditionError("cantor(k) needs 2 ≤ k ≤ 16")
    D = DiscreteSystem.from_counts(["*"], {("*", "*"): [str(i) for i in range(k)]}, f"cantor({k})")
    width = F(1, 2 * k - 1)
    R = GeometricRealization(
        {"*": Domain(((F(0),), (F(1),)), fills=False)},
        {str(i): _affine([[width]], [2 * i * width]) for i in range(k)},
        {},
    )
    exp = {
        "classification": Expectation({"*": "Cantor"}, "stated"),
        "component_counts": Expectation({n: k**n for n in range(13)}, "derived"),
        "lambda": Expectation(_frac(width), "constructed"),
    }
    return CatalogEntry("cantor", {"k": k}, D.to_system(), R, exp, D)


def walks(rule: str = "original", N: int = 6) -> CatalogEntry:
    if rule not in ("original", "modified"):
        raise PreconditionError("walks rule must be 'original' or 'modified'")
    if not 2 <= N <= 64:
        raise PreconditionError("walks(N) needs 2 ≤ N ≤ 64")
    D = walks_counts(N, modified=rule == "modified")
    if rule == "modified":
        cls = {str(i): "Cantor" for i in range(N + 1)}
    else:
        cls = {str(i): "Mixed" for i in range(N + 1)}
        cls["0"] = "Singleton"
    exp = {"classification": Expectation(cls, "stated")}
    return CatalogEntry(
        "walks",
        {"rule": rule, "N": N},
        D.to_system(),
        None,
        exp,
        D,
        notes=f"positions beyond {N} are cut off; interior objects behave as in the unbounded walk",
    )


def convergent_sequence() -> CatalogEntry:
    """X₁ ≅ X₁ and X₂ ≅ X₁ + X₂."""
    D = DiscreteSystem.from_counts(
        ["1", "2"], {("1", "1"): ["1>1"], ("1", "2"): ["1>2"], ("2", "2"): ["2>2"]}, "convergent_sequence"
    )
    samples = tuple((F(1, 2**n),) for n in range(8)) + ((F(0),),)
    R = GeometricRealization(
        {"1": Domain(((),)), "2": Domain(((F(0),), (F(1),)), fills=False, samples=samples)},
        {"1>1": AffineMap([], []), "1>2": _const([1], 0), "2>2": _affine([[F(1, 2)]], [0])},
        {},
    )
    exp = {
        "classification": Expectation({"1": "Singleton", "2": "Mixed"}, "stated"),
        "lambda": Expectation("1/2", "constructed"),
    }
    return CatalogEntry("convergent_sequence", {}, D.to_system(), R, exp, D)


# ---- the interval ----


def freyd_parts(k: int) -> tuple[list[str], list[str]]:
    points = [_frac(F(i, k)) for i in range(k + 1)]
    intervals = [f"[{_frac(F(i, k))},{_frac(F(i + 1, k))}]" for i in range(k)]
    return points, intervals


def freyd_system(k: int = 2, extra_objects: Sequence[str] = ()) -> EquationalSystem:
    points, intervals = freyd_parts(k)
    cat = FinCategory(["0", "1", *extra_objects], [("sigma", "0", "1"), ("tau", "0", "1")], {})
    sectors = [("id", "0", "0")] + [(p, "0", "1") for p in points] + [(iv, "1", "1") for iv in intervals]
    left = {("sigma", "id"): points[0], ("tau", "id"): points[-1]}
    right = {}
    for i, iv in enumerate(intervals):
        right[(iv, "sigma")] = points[i]
        right[(iv, "tau")] = points[i + 1]
    return EquationalSystem(cat, Module(cat, sectors, left, right), f"freyd({k})")


def freyd_realization(k: int = 2) -> GeometricRealization:
    points, intervals = freyd_parts(k)
    maps: dict[str, Any] = {"id": AffineMap([], [])}
    for i, p in enumerate(points):
        maps[p] = _const([F(i, k)], 0)
    for i, iv in enumerate(intervals):
        maps[iv] = _affine([[F(1, k)]], [F(i, k)])
    return GeometricRealization(
        {"0": Domain(((),)), "1": Domain(((F(0),), (F(1),)))},
        maps,
        {"sigma": _const([0], 0), "tau": _const([1], 0)},
    )


def freyd(k: int = 2) -> CatalogEntry:
    """The unit interval as k copies of itself glued end to end, with its endpoints."""
    if not 2 <= k <= 12:
        raise PreconditionError("freyd(k) needs 2 ≤ k ≤ 12")
    S = freyd_system(k)
    exp = {
        "sector_counts": Expectation({"0|0": 1, "0|1": k + 1, "1|0": 0, "1|1": k}, "stated"),
        "solvable": Expectation("Holds", "stated"),
        "decomposition": Expectation({"0": {"0": 1, "1": k - 1}, "1": {"1": k}}, "stated"),
        "component_counts_at_1": Expectation({n: 1 for n in range(7)}, "stated"),
        "lambda": Expectation(_frac(F(1, k)), "stated"),
    }
    return CatalogEntry("freyd", {"k": k}, S, freyd_realization(k), exp)


def circle() -> CatalogEntry:
    """The circle as the interval with its endpoints identified."""
    base = freyd_system(2, extra_objects=["2"])
    cat = base.category
    M = base.module
    sectors = [(m, *M.sectors[m]) for m in sorted(M.sectors)] + [("pt", "0", "2"), ("loop", "1", "2")]
    right = {k: v for k, v in M.right.items() if not cat.is_identity(k[1])}
    right[("loop", "sigma")] = "pt"
    right[("loop", "tau")] = "pt"
    left = {k: v for k, v in M.left.items() if not cat.is_identity(k[0])}
    S = EquationalSystem(cat, Module(cat, sectors, left, right), "circle")
    radius = 1 / (4 * math.pi)
    center = (0.5, 0.5)
    def on_circle(t: float, r: float) -> tuple[float, float]:
        return (center[0] + r * math.cos(2 * math.pi * t), center[1] + r * math.sin(2 * math.pi * t))

    ring = tuple(on_circle(j / 64, radius) for j in range(64))
    # the domain must be convex, so use a polygon circumscribing the circle
    hull = tuple(on_circle(j / 64, radius / math.cos(math.pi / 64)) for j in range(64))
    fr = freyd_realization(2)

    def fl(m: AffineMap) -> AffineMap:
        return AffineMap([[float(x) for x in row] for row in m.A], [float(x) for x in m.b])

    maps: dict[str, Any] = {m: fl(p) for m, p in fr.sector_maps.items()}  # type: ignore[arg-type]
    maps["pt"] = AffineMap([(), ()], [center[0] + radius, center[1]])
    maps["loop"] = ParametricMap("circle_quotient", {"center": list(center), "radius": radius}, 0.5, 1, 2)
    R = GeometricRealization(
        {
            "0": Domain(((),)),
            "1": Domain(((0.0,), (1.0,))),
            "2": Domain(hull, fills=False, samples=ring),
        },
        maps,
        {f: fl(p) for f, p in fr.arrow_maps.items()},
        mode="float",
    )
    exp = {"lambda": Expectation(0.5, "constructed"), "solvable": Expectation("Holds", "derived")}
    return CatalogEntry(
        "circle",
        {},
        S,
        R,
        exp,
        notes="the loop gluing map is non-affine; its Lipschitz constant 1/2 is declared and audited by sampling",
    )


# ---- point-glued self-similar sets ----


def glued_system(
    name: str,
    copies: Sequence[str],
    points: Sequence[str],
    classes: Mapping[str, Sequence[tuple[str, str]]],
    anchors: Mapping[str, tuple[str, str]],
) -> EquationalSystem:
    """Objects 0 (a point) and 1; an arrow ``sigma<p>`` for each marked point p;
    sectors: the copies 1 ⇸ 1, the classes 0 ⇸ 1 of glued (copy, point) pairs,
    and ``id`` on 0.  ``anchors[p]`` names a (copy, point) pair lying at p."""
    cls_of: dict[tuple[str, str], str] = {}
    for cname, members in classes.items():
        for pair in members:
            if tuple(pair) in cls_of:
                raise PreconditionError(f"pair {pair} lies in two classes")
            cls_of[tuple(pair)] = cname  # type: ignore[index]
    for i in copies:
        for p in points:
            if (i, p) not in cls_of:
                raise PreconditionError(f"pair ({i}, {p}) lies in no class")
    arrows = [(f"sigma{p}", "0", "1") for p in points]
    cat = FinCategory(["0", "1"], arrows, {})
    sectors = [("id", "0", "0")] + [(c, "0", "1") for c in classes] + [(i, "1", "1") for i in copies]
    left = {(f"sigma{p}", "id"): cls_of[tuple(anchors[p])] for p in points}  # type: ignore[index]
    right = {(i, f"sigma{p}"): cls_of[(i, p)] for i in copies for p in points}
    return EquationalSystem(cat, Module(cat, sectors, left, right), name)


def glued_realization(
    copies: Mapping[str, AffineMap],
    points: Mapping[str, Sequence[Fraction]],
    classes: Mapping[str, Sequence[tuple[str, str]]],
    vertices: Sequence[Sequence[Fraction]],
) -> GeometricRealization:
    maps: dict[str, Any] = {"id": AffineMap([], [])}
    maps.update(copies)
    for cname, members in classes.items():
        i, p = members[0]
        maps[cname] = _const(copies[i](points[p]), 0)
    return GeometricRealization(
        {"0": Domain(((),)), "1": Domain(tuple(tuple(v) for v in vertices), fills=False)},
        maps,
        {f"sigma{p}": _const(points[p], 0) for p in points},
    )


def sierpinski(n: int = 2) -> CatalogEntry:
    """The n-dimensional Sierpiński simplex: n+1 half-size copies meeting at midpoints."""
    if not 1 <= n <= 4:
        raise PreconditionError("sierpinski(n) needs 1 ≤ n ≤ 4")
    idx = [str(i) for i in range(n + 1)]
    classes = {f"[{i},{j}]": [(i, j), (j, i)] if i != j else [(i, i)] for i, j in combinations(idx, 2)}
    classes.update({f"[{i},{i}]": [(i, i)] for i in idx})
    classes = dict(sorted(classes.items()))
    S = glued_system(f"sierpinski({n})", idx, idx, classes, {p: (p, p) for p in idx})
    verts = [tuple(F(0) for _ in range(n))] + [tuple(F(int(j == i)) for j in range(n)) for i in range(n)]
    half = F(1, 2)
    copies = {i: _affine([[half * (r == c) for c in range(n)] for r in range(n)], [half * x for x in verts[int(i)]]) for i in idx}
    R = glued_realization(copies, {p: verts[int(p)] for p in idx}, classes, verts)
    exp = {
        "sectors_into_1_from_1": Expectation(n + 1, "stated"),
        "lambda": Expectation("1/2", "stated"),
        "full_cells": Expectation({d: (n + 1) ** d for d in range(6)}, "derived"),
    }
    return CatalogEntry("sierpinski", {"n": n}, S, R, exp)


DEFAULT_IFS: dict[str, Any] = {
    "vertices": [[0], [1]],
    "copies": {
        "a": {"A": [[F(1, 3)]], "b": [0]},
        "b": {"A": [[F(1, 3)]], "b": [F(1, 3)]},
        "c": {"A": [[F(1, 3)]], "b": [F(2, 3)]},
    },
    "points": {"l": [0], "r": [1]},
    "classes": {
        "a.l": [["a", "l"]],
        "a.r=b.l": [["a", "r"], ["b", "l"]],
        "b.r=c.l": [["b", "r"], ["c", "l"]],
        "c.r": [["c", "r"]],
    },
    "anchors": {"l": ["a", "l"], "r": ["c", "r"]},
}


def ifs(data: Mapping[str, Any] | None = None) -> CatalogEntry:
    """An iterated function system whose copies meet only at listed marked points.

    The gluing relation on (copy, point) pairs is supplied, not computed.
    """
    default = data is None
    data = dict(DEFAULT_IFS if data is None else data)
    for key in ("vertices", "copies", "points", "classes", "anchors"):
        if key not in data:
            raise PreconditionError(f"ifs data needs {key!r}")
    copies = {i: _affine(m["A"], m["b"]) for i, m in sorted(data["copies"].items())}
    points = {p: tuple(F(x) for x in v) for p, v in sorted(data["points"].items())}
    classes = {c: [tuple(pair) for pair in ms] for c, ms in sorted(data["classes"].items())}
    anchors = {p: tuple(v) for p, v in data["anchors"].items()}
    S = glued_system("ifs", list(copies), list(points), classes, anchors)  # type: ignore[arg-type]
    verts = [tuple(F(x) for x in v) for v in data["vertices"]]
    R = glued_realization(copies, points, classes, verts)  # type: ignore[arg-type]
    exp: dict[str, Expectation] = {}
    if default:
        exp["lambda"] = Expectation("1/3", "constructed")
    return CatalogEntry("ifs", {}, S, R, exp)


# ---- subdivisions of simplices ----


def _injections(n: int, m: int) -> list[tuple[int, ...]]:
    return list(combinations(range(m + 1), n + 1))


def _inj_id(n: int, m: int, f: tuple[int, ...]) -> str:
    return f"{n}to{m}:" + "".join(map(str, f))


def delta_inj(d: int) -> tuple[FinCategory, dict[tuple[int, int, tuple[int, ...]], str]]:
    """Order-preserving injections between [0]..[d]."""
    names: dict[tuple[int, int, tuple[int, ...]], str] = {}
    arrows = []
    for n in range(d + 1):
        for m in range(n + 1, d + 1):
            for f in _injections(n, m):
                nm = _inj_id(n, m, f)
                names[(n, m, f)] = nm
                arrows.append((nm, f"[{n}]", f"[{m}]"))
    compose = {}
    for (n, m, f), fid in names.items():
        for (m2, k, g), gid in names.items():
            if m2 == m:
                compose[(gid, fid)] = names[(n, k, tuple(g[i] for i in f))]
    cat = FinCategory([f"[{m}]" for m in range(d + 1)], arrows, compose)
    for n in range(d + 1):
        names[(n, n, tuple(range(n + 1)))] = cat.identity[f"[{n}]"]
    return cat, names


def _simplex_vertices(m: int) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(F(int(i == j)) for j in range(m + 1)) for i in range(m + 1))


def _arrow_maps(names: Mapping[tuple[int, int, tuple[int, ...]], str]) -> dict[str, AffineMap]:
    out = {}
    for (n, m, f), fid in names.items():
        if n == m:
            continue
        A = [[F(int(f[c] == r)) for c in range(n + 1)] for r in range(m + 1)]
        out[fid] = AffineMap(A, [F(0)] * (m + 1))
    return out


def _chains(m: int, length: int) -> list[tuple[frozenset[int], ...]]:
    subsets = [frozenset(c) for r in range(1, m + 2) for c in combinations(range(m + 1), r)]
    out: list[tuple[frozenset[int], ...]] = []

    def go(prefix: tuple[frozenset[int], ...]) -> None:
        if len(prefix) == length:
            out.append(prefix)
            return
        for s in subsets:
            if not prefix or (prefix[-1] < s):
                go(prefix + (s,))

    go(())
    return out


def _chain_id(m: int, Q: Sequence[frozenset[int]]) -> str:
    return f"[{m}]" + "".join("{" + "".join(map(str, sorted(q))) + "}" for q in Q)


def barycentric(d: int = 2) -> CatalogEntry:
    """Each simplex as the union of the simplices of its barycentric subdivision."""
    if not 1 <= d <= 4:
        raise PreconditionError("barycentric(d) needs 1 ≤ d ≤ 4")
    cat, names = delta_inj(d)
    sectors = []
    chain_of: dict[str, tuple[int, int, tuple[frozenset[int], ...]]] = {}
    ids: dict[tuple[int, tuple[frozenset[int], ...]], str] = {}
    for m in range(d + 1):
        for n in range(m + 1):
            for Q in _chains(m, n + 1):
                sid = _chain_id(m, Q)
                sectors.append((sid, f"[{n}]", f"[{m}]"))
                chain_of[sid] = (n, m, Q)
                ids[(m, Q)] = sid
    left = {}
    right = {}
    for sid, (n, m, Q) in chain_of.items():
        for (a, b, f), fid in names.items():
            if a == m and b > m:
                left[(fid, sid)] = ids[(b, tuple(frozenset(f[i] for i in q) for q in Q))]
            if b == n and a < n:
                right[(sid, fid)] = ids[(m, tuple(Q[i] for i in f))]
    S = EquationalSystem(cat, Module(cat, sectors, left, right), f"barycentric({d})")
    maps = {}
    for sid, (n, m, Q) in chain_of.items():
        A = [[F(int(r in Q[j]), len(Q[j])) for j in range(n + 1)] for r in range(m + 1)]
        maps[sid] = AffineMap(A, [F(0)] * (m + 1))
    R = GeometricRealization(
        {f"[{m}]": Domain(_simplex_vertices(m)) for m in range(d + 1)}, maps, _arrow_maps(names)
    )
    exp = {
        "top_sectors": Expectation({f"[{m}]": math.factorial(m + 1) for m in range(d + 1)}, "stated"),
        "decay_ratio": Expectation(_frac(F(d, d + 1)), "stated"),
    }
    return CatalogEntry("barycentric", {"d": d}, S, R, exp)


def _monotone_maps(n: int, m: int) -> list[tuple[int, ...]]:
    return [t for t in cartesian(range(m + 1), repeat=n + 1) if all(t[i] <= t[i + 1] for i in range(n))]


def _edge_id(m: int, p: Sequence[int], q: Sequence[int]) -> str:
    return f"[{m}]p" + "".join(map(str, p)) + "q" + "".join(map(str, q))


def edgewise(d: int = 2) -> CatalogEntry:
    """Each simplex as the union of the 2^m simplices of its edgewise subdivision."""
    if not 1 <= d <= 4:
        raise PreconditionError("edgewise(d) needs 1 ≤ d ≤ 4")
    cat, names = delta_inj(d)
    sectors = []
    pair_of: dict[str, tuple[int, int, tuple[int, ...], tuple[int, ...]]] = {}
    ids: dict[tuple[int, tuple[int, ...], tuple[int, ...]], str] = {}
    for m in range(d + 1):
        for n in range(2 * m + 2):
            mono = _monotone_maps(n, m)
            for p in mono:
                for q in mono:
                    if p[n] > q[0]:
                        continue
                    if len(set(zip(p, q))) != n + 1:
                        continue
                    sid = _edge_id(m, p, q)
                    if n > d:
                        raise PreconditionError("internal: sector from a missing object")
                    sectors.append((sid, f"[{n}]", f"[{m}]"))
                    pair_of[sid] = (n, m, p, q)
                    ids[(m, p, q)] = sid
    left = {}
    right = {}
    for sid, (n, m, p, q) in pair_of.items():
        for (a, b, f), fid in names.items():
            if a == m and b > m:
                left[(fid, sid)] = ids[(b, tuple(f[i] for i in p), tuple(f[i] for i in q))]
            if b == n and a < n:
                right[(sid, fid)] = ids[(m, tuple(p[i] for i in f), tuple(q[i] for i in f))]
    S = EquationalSystem(cat, Module(cat, sectors, left, right), f"edgewise({d})")
    maps = {}
    for sid, (n, m, p, q) in pair_of.items():
        A = [[F(int(r == p[j]) + int(r == q[j]), 2) for j in range(n + 1)] for r in range(m + 1)]
        maps[sid] = AffineMap(A, [F(0)] * (m + 1))
    R = GeometricRealization(
        {f"[{m}]": Domain(_simplex_vertices(m)) for m in range(d + 1)}, maps, _arrow_maps(names)
    )
    exp = {"top_sectors": Expectation({f"[{m}]": 2**m for m in range(d + 1)}, "stated")}
    if d <= 2:
        exp["top_cell_diameter_ratio"] = Expectation("1/2", "stated")
    else:
        # the middle cells keep a long diagonal for one step, then halve
        exp["decay_ratio_after_first_step"] = Expectation("1/2", "derived")
    return CatalogEntry("edgewise", {"d": d}, S, R, exp)


# ---- the Julia example (combinatorial data only) ----


def julia() -> CatalogEntry:
    """Combinatorial gluing data with the sector counts of the Julia set example."""
    arrows = [(f"u{i}", "0", "2") for i in range(1, 5)] + [(f"v{i}", "0", "3") for i in range(1, 5)]
    cat = FinCategory(["0", "1", "2", "3"], arrows, {})
    sectors = [("e", "0", "0")]
    sectors += [(s, "2", "1") for s in ("a", "b")] + [(f"o{i}", "0", "1") for i in range(1, 7)]
    sectors += [(s, "2", "2") for s in ("c", "d")] + [("g", "3", "2")]
    sectors += [(f"x{i}", "0", "2") for i in range(1, 5)] + [(f"y{i}", "0", "2") for i in range(1, 5)]
    sectors += [(s, "3", "3") for s in ("h", "k")]
    sectors += [(f"z{i}", "0", "3") for i in range(1, 5)] + [("w1", "0", "3"), ("w2", "0", "3")]
    left = {(f"u{i}", "e"): f"x{i}" for i in range(1, 5)}
    left.update({(f"v{i}", "e"): f"z{i}" for i in range(1, 5)})
    table = {
        ("a", "u"): ("o1", "o2", "o3", "o4"),
        ("b", "u"): ("o1", "o5", "o3", "o6"),
        ("c", "u"): ("x1", "y1", "y2", "x2"),
        ("d", "u"): ("x3", "y3", "y4", "x4"),
        ("g", "v"): ("y1", "y2", "y3", "y4"),
        ("h", "v"): ("z1", "w1", "z2", "w2"),
        ("k", "v"): ("w1", "z3", "w2", "z4"),
    }
    right = {}
    for (s, letter), images in table.items():
        for i, img in enumerate(images, start=1):
            right[(s, f"{letter}{i}")] = img
    S = EquationalSystem(
        cat, Module(cat, sectors, left, right), "julia", {"status": "conjectural universality, data only"}
    )
    exp = {
        "sector_counts_into_2": Expectation({"0": 8, "1": 0, "2": 2, "3": 1}, "stated"),
    }
    return CatalogEntry(
        "julia",
        {},
        S,
        None,
        exp,
        notes="conjectural universality, data only; no realization is attached",
    )


# ---- products ----


def product_realization(
    S: EquationalSystem, T: EquationalSystem, R: GeometricRealization, Q: GeometricRealization
) -> GeometricRealization:
    if not (R.affine and Q.affine) or R.mode != Q.mode:
        raise PreconditionError("product realizations need affine factors in one mode")

    def block(p: AffineMap, q: AffineMap, ds: int, es: int) -> AffineMap:
        zero = F(0) if R.rational else 0.0
        rows = [tuple(row) + (zero,) * es for row in p.A] + [(zero,) * ds + tuple(row) for row in q.A]
        return AffineMap(rows, tuple(p.b) + tuple(q.b))

    domains = {}
    for a, da in R.domains.items():
        for b, db in Q.domains.items():
            domains[tuple_id((a, b))] = Domain(
                tuple(v + w for v in da.vertices for w in db.vertices), fills=da.fills and db.fills
            )
    maps = {}
    for m, p in S.module.sectors.items():
        for n, q in T.module.sectors.items():
            ds = R.domains[p[0]].dim
            es = Q.domains[q[0]].dim
            maps[tuple_id((m, n))] = block(R.sector_maps[m], Q.sector_maps[n], ds, es)  # type: ignore[arg-type]
    arrows = {}
    A, B = S.category, T.category
    for f in A.arrows:
        for g in B.arrows:
            if A.is_identity(f) and B.is_identity(g):
                continue
            ds, es = R.domains[A.src(f)].dim, Q.domains[B.src(g)].dim
            arrows[tuple_id((f, g))] = block(R.arrow_map(S, f), Q.arrow_map(T, g), ds, es)
    return GeometricRealization(domains, maps, arrows, R.mode)


def product(first: CatalogEntry, second: CatalogEntry) -> CatalogEntry:
    S = product_system(first.system, second.system)
    R = None
    if first.realization is not None and second.realization is not None:
        try:
            R = product_realization(first.system, second.system, first.realization, second.realization)
        except PreconditionError:
            R = None
    exp: dict[str, Expectation] = {}
    if first.discrete is not None and second.discrete is not None and first.name == second.name == "cantor":
        k = first.params["k"] * second.params["k"]
        exp["stream_counts"] = Expectation({n: k**n for n in range(7)}, "constructed")
    D = None
    if S.category.is_discrete():
        from .discrete import from_system

        D = from_system(S)
    return CatalogEntry(
        "product", {"first": _label(first), "second": _label(second)}, S, R, exp, D
    )


def _label(e: CatalogEntry) -> str:
    if not e.params:
        return e.name
    return f"{e.name}(" + ",".join(str(v) for v in e.params.values()) + ")"


# ---- registry ----

BUILDERS: dict[str, Callable[..., CatalogEntry]] = {
    "cantor": cantor,
    "walks": walks,
    "freyd": freyd,
    "circle": circle,
    "sierpinski": sierpinski,
    "ifs": ifs,
    "barycentric": barycentric,
    "edgewise": edgewise,
    "julia": julia,
    "product": product,
    "convergent_sequence": convergent_sequence,
}

DEFAULT_NAMES = [
    "cantor(2)",
    "walks(original,6)",
    "walks(modified,6)",
    "freyd(2)",
    "circle",
    "sierpinski(2)",
    "ifs",
    "barycentric(2)",
    "edgewise(2)",
    "julia",
    "product(cantor(2),cantor(3))",
    "convergent_sequence",
]


def _split_args(s: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "," and depth == 0:
            out.append(cur.strip())
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    if cur.strip():
        out.append(cur.strip())
    return out


def _coerce(arg: str) -> Any:
    if re.fullmatch(r"-?\d+", arg):
        return int(arg)
    return arg


def build(name: str, params: Mapping[str, Any] | None = None) -> CatalogEntry:
    """Build an entry from ``name`` such as ``freyd(3)`` or ``product(cantor(2),cantor(3))``."""
    match = re.fullmatch(r"\s*([a-z_]+)\s*(?:\((.*)\))?\s*", name)
    if not match:
        raise PreconditionError(f"cannot parse catalog name {name!r}")
    key, argtext = match.group(1), match.group(2)
    if key not in BUILDERS:
        raise PreconditionError(f"unknown catalog entry {key!r}")
    args = _split_args(argtext) if argtext else []
    if key == "product":
        if len(args) != 2:
            raise PreconditionError("product needs two entries")
        return product(build(args[0]), build(args[1]))
    kwargs = dict(params or {})
    try:
        return BUILDERS[key](*[_coerce(a) for a in args], **kwargs)
    except TypeError as exc:
        raise PreconditionError(f"bad parameters for {key}: {exc}") from exc


def expected(name: str) -> dict[str, Expectation]:
    return build(name).expected


def names() -> list[str]:
    return list(DEFAULT_NAMES)


# ---- coalgebras ----


def _rotate(w: str) -> str:
    return w[1:] + w[:1]


def cantor_stream(k: int = 2, L: int = 4) -> Coalgebra:
    """Words of length L over k letters; each word emits its first letter and rotates."""
    S = cantor(k).system
    words = ["".join(map(str, t)) for t in cartesian(range(k), repeat=L)]
    xi = {("*", w): (w[0], _rotate(w)) for w in words}
    return coalgebra_from_tables(S, {"*": words}, {}, xi, f"cantor_stream({k},{L})")


def product_stream(k: int = 2, l: int = 3, L: int = 3) -> Coalgebra:
    """The product of two rotation coalgebras on the product system."""
    S = product(cantor(k), cantor(l)).system
    A = ["".join(map(str, t)) for t in cartesian(range(k), repeat=L)]
    B = ["".join(map(str, t)) for t in cartesian(range(l), repeat=L)]
    obj = tuple_id(("*", "*"))
    elems = [tuple_id((w, v)) for w in A for v in B]
    xi = {
        (obj, tuple_id((w, v))): (tuple_id((w[0], v[0])), tuple_id((_rotate(w), _rotate(v))))
        for w in A
        for v in B
    }
    return coalgebra_from_tables(S, {obj: elems}, {}, xi, f"product_stream({k},{l},{L})")


def freyd_nondyadic(q: int = 7) -> Coalgebra:
    """Fractions j/q with q odd, each doubling into the half that contains it."""
    if q < 3 or q % 2 == 0:
        raise PreconditionError("freyd_nondyadic needs an odd q ≥ 3")
    S = freyd_system(2)
    xs = [F(j, q) for j in range(1, q)]
    xi = {}
    for x in xs:
        if x < F(1, 2):
            xi[("1", _frac(x))] = ("[0,1/2]", _frac(2 * x))
        else:
            xi[("1", _frac(x))] = ("[1/2,1]", _frac(2 * x - 1))
    return coalgebra_from_tables(S, {"0": [], "1": [_frac(x) for x in xs]}, {}, xi, f"freyd_nondyadic({q})")


def freyd_grid(L: int = 3) -> Coalgebra:
    """Dyadic grid points j/2^L with both endpoints marked."""
    S = freyd_system(2)
    xs = [F(j, 2**L) for j in range(2**L + 1)]
    xi: dict[tuple[str, str], tuple[str, str]] = {("0", "*"): ("id", "*")}
    for x in xs:
        if x < F(1, 2):
            xi[("1", _frac(x))] = ("[0,1/2]", _frac(2 * x))
        else:
            xi[("1", _frac(x))] = ("[1/2,1]", _frac(2 * x - 1))
    on_arrows = {("sigma", "*"): "0", ("tau", "*"): "1"}
    return coalgebra_from_tables(S, {"0": ["*"], "1": [_frac(x) for x in xs]}, on_arrows, xi, f"freyd_grid({L})")


def freyd_three_point() -> Coalgebra:
    """Endpoints plus one interior point that keeps choosing the left half."""
    S = freyd_system(2)
    xi = {
        ("0", "*"): ("id", "*"),
        ("1", "0"): ("[0,1/2]", "0"),
        ("1", "2/3"): ("[0,1/2]", "2/3"),
        ("1", "1"): ("[1/2,1]", "1"),
    }
    on_arrows = {("sigma", "*"): "0", ("tau", "*"): "1"}
    return coalgebra_from_tables(S, {"0": ["*"], "1": ["0", "2/3", "1"]}, on_arrows, xi, "freyd_three_point")


def freyd_degenerate() -> Coalgebra:
    """Both endpoints sent to one point: a carrier that is not nondegenerate."""
    S = freyd_system(2)
    xi = {("0", "*"): ("id", "*"), ("1", "u"): ("[0,1/2]", "u")}
    on_arrows = {("sigma", "*"): "u", ("tau", "*"): "u"}
    return coalgebra_from_tables(S, {"0": ["*"], "1": ["u"]}, on_arrows, xi, "freyd_degenerate")


def sierpinski_address(n: int = 2, L: int = 3) -> Coalgebra:
    """Cyclic addresses of length L; constant words are the marked corners."""
    S = sierpinski(n).system
    idx = [str(i) for i in range(n + 1)]
    words = ["".join(t) for t in cartesian(idx, repeat=L)]
    xi: dict[tuple[str, str], tuple[str, str]] = {("0", "*"): ("id", "*")}
    for w in words:
        xi[("1", w)] = (w[0], _rotate(w))
    on_arrows = {(f"sigma{i}", "*"): i * L for i in idx}
    return coalgebra_from_tables(S, {"0": ["*"], "1": words}, on_arrows, xi, f"sierpinski_address({n},{L})")


def freyd_representable(depth: int = 6) -> Coalgebra:
    """The representable coalgebra on the lasso [1/2,1] then [0,1/2] repeated."""
    S = freyd_system(2)
    L = LassoComplex("1", ("[1/2,1]",), ("[0,1/2]",))
    return representable_coalgebra(S, L, depth).coalgebra


COALGEBRAS: dict[str, Callable[..., Coalgebra]] = {
    "cantor_stream": cantor_stream,
    "product_stream": product_stream,
    "freyd_nondyadic": freyd_nondyadic,
    "freyd_grid": freyd_grid,
    "freyd_three_point": freyd_three_point,
    "freyd_degenerate": freyd_degenerate,
    "sierpinski_address": sierpinski_address,
    "freyd_representable": freyd_representable,
}

NONDEGENERATE_COALGEBRAS = [k for k in COALGEBRAS if k != "freyd_degenerate"]


def coalgebra(name: str, *args: Any) -> Coalgebra:
    if name not in COALGEBRAS:
        raise PreconditionError(f"unknown catalog coalgebra {name!r}")
    return COALGEBRAS[name](*args)


__all__ = [
    "CatalogEntry",
    "Expectation",
    "build",
    "expected",
    "names",
    "coalgebra",
    "COALGEBRAS",
    "NONDEGENERATE_COALGEBRAS",
]
