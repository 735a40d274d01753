"""Geometric realizations: gluing maps between convex domains, contraction
audits, address cells, diameter decay, approximant sets and rendering."""

from __future__ import annotations

import csv
import heapq
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Callable, Mapping, Sequence, Union

import numpy as np

from . import _geometry as geo
from ._geometry import AffineMap, Number, Point
from ._support import PreconditionError, Report, ResourceCapExceeded, Violation, default_budget
from .coalgebra import Coalgebra
from .discrete import nonempty_objects
from .finmod import EquationalSystem

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Domain:
    """Convex hull of ``vertices``.

    ``fills`` says whether the hull itself is meant to be covered by cells;
    when it is false only ``samples`` (or the vertices) are audited.
    """

    vertices: tuple[Point, ...]
    fills: bool = True
    samples: tuple[Point, ...] = ()

    @property
    def dim(self) -> int:
        return len(self.vertices[0]) if self.vertices else 0

    @property
    def empty(self) -> bool:
        return not self.vertices

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "dim": self.dim,
            "vertices": [[geo.fmt_number(c) for c in v] for v in self.vertices],
        }
        if not self.fills:
            out["fills"] = False
        if self.samples:
            out["samples"] = [[geo.fmt_number(c) for c in v] for v in self.samples]
        return out


def _circle_quotient(params: Mapping[str, Any]) -> Callable[[Sequence[Number]], Point]:
    cx, cy = (float(c) for c in params.get("center", (0.0, 0.0)))
    r = float(params["radius"])

    def f(p: Sequence[Number]) -> Point:
        t = float(p[0])
        return (cx + r * math.cos(2 * math.pi * t), cy + r * math.sin(2 * math.pi * t))

    return f


PARAMETRIC_KINDS: dict[str, Callable[[Mapping[str, Any]], Callable[[Sequence[Number]], Point]]] = {
    "circle_quotient": _circle_quotient,
}


@dataclass(frozen=True)
class ParametricMap:
    """A non-affine map evaluated pointwise, with a user-declared Lipschitz constant."""

    kind: str
    params: dict[str, Any]
    lipschitz: float
    source_dim: int
    target_dim: int

    def __post_init__(self) -> None:
        if self.kind not in PARAMETRIC_KINDS:
            raise PreconditionError(f"unknown parametric map kind {self.kind!r}")

    def __call__(self, p: Sequence[Number]) -> Point:
        return PARAMETRIC_KINDS[self.kind](self.params)(p)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params,
            "lipschitz": self.lipschitz,
            "source_dim": self.source_dim,
            "target_dim": self.target_dim,
        }


SectorMap = Union[AffineMap, ParametricMap]


@dataclass(frozen=True)
class GeometricRealization:
    domains: dict[str, Domain]
    sector_maps: dict[str, SectorMap]
    arrow_maps: dict[str, AffineMap]
    mode: str = "rational"
    tol: float = DEFAULT_TOL

    @property
    def rational(self) -> bool:
        return self.mode == "rational"

    @property
    def affine(self) -> bool:
        return all(isinstance(p, AffineMap) for p in self.sector_maps.values())

    def arrow_map(self, S: EquationalSystem, f: str) -> AffineMap:
        cat = S.category
        if cat.is_identity(f):
            return geo.identity_map(self.domains[cat.src(f)].dim, self.rational)
        return self.arrow_maps[f]

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "domains": {a: d.to_json() for a, d in sorted(self.domains.items())},
            "sector_maps": {m: p.to_json() for m, p in sorted(self.sector_maps.items())},
            "arrow_maps": {f: p.to_json() for f, p in sorted(self.arrow_maps.items())},
        }


def sample_points(domain: Domain, k: int = 8, interior: bool = True) -> list[Point]:
    """Vertices, then (optionally) a grid on every vertex pair and the centroid."""
    pts = list(dict.fromkeys(domain.vertices))
    pts.extend(p for p in domain.samples if p not in pts)
    if not interior or len(domain.vertices) <= 1:
        return pts
    verts = domain.vertices
    exact = isinstance(verts[0][0], Fraction)
    one = Fraction(1) if exact else 1.0
    if len(verts) <= 8:
        for v, w in combinations(verts, 2):
            for i in range(1, k):
                t = one * i / k
                p = tuple((1 - t) * a + t * b for a, b in zip(v, w))
                if p not in pts:
                    pts.append(p)
    centroid = tuple(sum(cs, 0 * one) / len(verts) for cs in zip(*verts))
    if centroid not in pts:
        pts.append(centroid)
    return pts


def _close(p: Sequence[Number], q: Sequence[Number], R: GeometricRealization) -> bool:
    if R.rational and all(isinstance(c, Fraction) for c in (*p, *q)):
        return tuple(p) == tuple(q)
    return math.dist([float(c) for c in p], [float(c) for c in q]) <= R.tol


def _in_domain(p: Sequence[Number], d: Domain, R: GeometricRealization) -> bool:
    return geo.in_hull(p, d.vertices, R.tol)


def _map_points(m: SectorMap, d: Domain) -> list[Point]:
    if isinstance(m, AffineMap):
        return [m(v) for v in d.vertices]
    return [m(p) for p in sample_points(d, 32)]


def _live_objects(S: EquationalSystem) -> set[str]:
    from .discrete import DiscreteSystem

    objs = S.category.objects
    table: dict[tuple[str, str], list[str]] = {}
    for m, (b, a) in S.module.sectors.items():
        table.setdefault((b, a), []).append(m)
    return nonempty_objects(DiscreteSystem(tuple(objs), {k: tuple(v) for k, v in table.items()}))


def check_realization(S: EquationalSystem, R: GeometricRealization) -> Report:
    """Presence, dimensions, containment, naturality and occupancy."""
    cat = S.category
    M = S.module
    out: list[Violation] = []
    for a in cat.objects:
        if a not in R.domains:
            out.append(Violation("missing domain", {"object": a}))
    for m in sorted(M.sectors):
        if m not in R.sector_maps:
            out.append(Violation("missing sector map", {"sector": m}))
    for f in cat.non_identity_arrows():
        if f not in R.arrow_maps:
            out.append(Violation("missing arrow map", {"arrow": f}))
    if out:
        return Report(tuple(out))

    def dims_ok(kind: str, ident: str, p: SectorMap, src: str, tgt: str) -> bool:
        ds, dt = R.domains[src].dim, R.domains[tgt].dim
        if isinstance(p, AffineMap):
            ok = p.target_dim == dt and all(len(row) == ds for row in p.A)
        else:
            ok = p.source_dim == ds and p.target_dim == dt
        if not ok:
            out.append(Violation("dimension mismatch", {kind: ident, "source_dim": ds, "target_dim": dt}))
        return ok

    good_sectors = [m for m in sorted(M.sectors) if dims_ok("sector", m, R.sector_maps[m], *M.sectors[m])]
    good_arrows = [f for f in cat.non_identity_arrows() if dims_ok("arrow", f, R.arrow_maps[f], *cat.arrows[f])]
    if out:
        return Report(tuple(out))

    for m in good_sectors:
        b, a = M.sectors[m]
        dom = R.domains[b]
        if dom.empty:
            continue
        for p in _map_points(R.sector_maps[m], dom):
            if not _in_domain(p, R.domains[a], R):
                out.append(Violation("outside target", {"sector": m, "point": _fmt_point(p)}))
                break
    for f in good_arrows:
        s, t = cat.arrows[f]
        if R.domains[s].empty:
            continue
        for p in _map_points(R.arrow_maps[f], R.domains[s]):
            if not _in_domain(p, R.domains[t], R):
                out.append(Violation("outside target", {"arrow": f, "point": _fmt_point(p)}))
                break

    for (g, f), h in sorted(cat.table.items()):
        if cat.is_identity(g) or cat.is_identity(f):
            continue
        dom = R.domains[cat.src(f)]
        Jg, Jf, Jh = R.arrow_map(S, g), R.arrow_map(S, f), R.arrow_map(S, h)
        for v in dom.vertices:
            if not _close(Jh(v), Jg(Jf(v)), R):
                out.append(Violation("functoriality", {"composite": f"{g}|{f}", "vertex": _fmt_point(v)}))
                break

    for m in good_sectors:
        b, a = M.sectors[m]
        psi = R.sector_maps[m]
        pts_b = _naturality_points(R, b, psi)
        for f in cat.arrows_from(a):
            if cat.is_identity(f):
                continue
            fm = M.left[(f, m)]
            Jf = R.arrow_maps[f]
            for v in pts_b:
                if not _close(R.sector_maps[fm](v), Jf(psi(v)), R):
                    out.append(Violation("naturality", {"sector": m, "arrow": f, "side": "left", "point": _fmt_point(v)}))
                    break
        for g in cat.arrows_into(b):
            if cat.is_identity(g):
                continue
            mg = M.right[(m, g)]
            Jg = R.arrow_maps[g]
            for v in _naturality_points(R, cat.src(g), R.sector_maps[mg]):
                if not _close(R.sector_maps[mg](v), psi(Jg(v)), R):
                    out.append(Violation("naturality", {"sector": m, "arrow": g, "side": "right", "point": _fmt_point(v)}))
                    break

    for a in sorted(_live_objects(S)):
        if R.domains[a].empty:
            out.append(Violation("occupancy", {"object": a}))
    return Report(tuple(out))


def _naturality_points(R: GeometricRealization, b: str, psi: SectorMap) -> list[Point]:
    dom = R.domains[b]
    if dom.empty:
        return []
    if isinstance(psi, AffineMap) and R.affine:
        return list(dom.vertices)
    return sample_points(dom, 16)


def _fmt_point(p: Sequence[Number]) -> list:
    return [geo.fmt_number(c) for c in p]


# ---- contraction factors ----


@dataclass(frozen=True)
class Contraction:
    value: float
    exact: Fraction | None = None
    declared: bool = False
    sampled: float | None = None

    def to_json(self) -> dict:
        out: dict[str, Any] = {"value": self.value}
        if self.exact is not None:
            out["exact"] = geo.fmt_number(self.exact)
        if self.declared:
            out["declared"] = True
            out["sampled"] = self.sampled
        return out


def _chord_ratio(psi: ParametricMap, dom: Domain) -> float:
    pts = sample_points(dom, 64)
    imgs = [psi(p) for p in pts]
    best = 0.0
    for i, j in combinations(range(len(pts)), 2):
        d = math.dist([float(c) for c in pts[i]], [float(c) for c in pts[j]])
        if d > 0:
            best = max(best, math.dist(imgs[i], imgs[j]) / d)
    return best


def contraction_factors(S: EquationalSystem, R: GeometricRealization) -> dict[str, Contraction]:
    """Lipschitz constant of each sector map on its source domain.

    Raises PreconditionError when sampling a parametric map exceeds its
    declared constant.
    """
    out: dict[str, Contraction] = {}
    for m in sorted(S.module.sectors):
        b = S.module.src(m)
        dom = R.domains[b]
        psi = R.sector_maps[m]
        if isinstance(psi, ParametricMap):
            sampled = _chord_ratio(psi, dom)
            if sampled > psi.lipschitz + R.tol:
                raise PreconditionError(
                    f"sector {m}: sampled chord ratio {sampled:.6g} exceeds declared {psi.lipschitz}"
                )
            out[m] = Contraction(float(psi.lipschitz), None, True, sampled)
            continue
        basis = geo.direction_basis(dom.vertices)
        if basis.shape[1] == 0:
            out[m] = Contraction(0.0, Fraction(0) if R.rational else None)
            continue
        A = np.array([[float(c) for c in row] for row in psi.A], dtype=float)
        value = geo.spectral_norm(A @ basis)
        exact = None
        if R.rational:
            sq = geo.exact_similarity_ratio(psi, dom.vertices)
            if sq is not None:
                exact = geo.fraction_sqrt(sq)
        if exact is not None:
            value = float(exact)
        out[m] = Contraction(value, exact)
    return out


# ---- address cells ----


@dataclass(frozen=True)
class Cell:
    address: tuple[str, ...]
    source: str
    vertices: tuple[Point, ...]

    def sq_diameter(self) -> Number:
        return geo.sq_diameter(self.vertices)

    def to_json(self) -> dict:
        return {"address": list(self.address), "source": self.source, "vertices": [_fmt_point(v) for v in self.vertices]}


class _Composite:
    """A chain of gluing maps, outermost first, with adjacent affine maps merged."""

    __slots__ = ("maps",)

    def __init__(self, maps: tuple[SectorMap, ...]) -> None:
        self.maps = maps

    def then_inner(self, psi: SectorMap) -> "_Composite":
        if self.maps and isinstance(self.maps[-1], AffineMap) and isinstance(psi, AffineMap):
            return _Composite(self.maps[:-1] + (self.maps[-1].compose(psi),))
        return _Composite(self.maps + (psi,))

    def image(self, dom: Domain) -> tuple[Point, ...]:
        if all(isinstance(p, AffineMap) for p in self.maps):
            pts = list(dom.vertices)
        else:
            pts = sample_points(dom, 16)
        for psi in reversed(self.maps):
            pts = [psi(p) for p in pts]
        return tuple(pts)


def _identity_composite(R: GeometricRealization, a: str) -> _Composite:
    return _Composite((geo.identity_map(R.domains[a].dim, R.rational),))


@dataclass(frozen=True)
class CellTree:
    base_object: str
    levels: tuple[tuple[Cell, ...], ...]

    @classmethod
    def build(
        cls, S: EquationalSystem, R: GeometricRealization, a: str, n: int, budget: int | None = None
    ) -> "CellTree":
        cap = default_budget() if budget is None else budget
        M = S.module
        frontier = [((), a, _identity_composite(R, a))]
        levels = [(Cell((), a, tuple(R.domains[a].vertices)),)]
        total = 1
        for _ in range(n):
            nxt = []
            for address, b, comp in frontier:
                for m in M.into(b):
                    nxt.append((address + (m,), M.src(m), comp.then_inner(R.sector_maps[m])))
            total += len(nxt)
            if total > cap:
                raise ResourceCapExceeded("cell enumeration", cap)
            nxt.sort(key=lambda t: t[0])
            levels.append(tuple(Cell(ad, c, comp.image(R.domains[c])) for ad, c, comp in nxt))
            frontier = nxt
        return cls(a, tuple(levels))

    def cells(self, n: int) -> tuple[Cell, ...]:
        return self.levels[n]

    def check_nesting(self, R: GeometricRealization) -> Report:
        out: list[Violation] = []
        for n in range(1, len(self.levels)):
            parents = {c.address: c for c in self.levels[n - 1]}
            for cell in self.levels[n]:
                parent = parents[cell.address[:-1]]
                if not all(geo.in_hull(v, parent.vertices, R.tol) for v in cell.vertices):
                    out.append(Violation("nesting", {"address": list(cell.address)}))
        return Report(tuple(out))


# ---- crude recognition ----


@dataclass(frozen=True)
class CrudeCertificate:
    factor: float
    exact_factor: Fraction | None
    depth: int
    eps: float
    coverage_gap: float

    ok = True

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "verdict": "certificate",
            "lambda": self.factor,
            "depth": self.depth,
            "eps": self.eps,
            "coverage_gap": self.coverage_gap,
        }
        if self.exact_factor is not None:
            out["lambda_exact"] = geo.fmt_number(self.exact_factor)
        return out


@dataclass(frozen=True)
class CrudeFailure:
    reason: str
    detail: dict[str, Any] = field(default_factory=dict)

    ok = False

    def to_json(self) -> dict:
        return {"verdict": "failure", "reason": self.reason, "detail": self.detail}


def _point_gap(p: Point, vertices: Sequence[Point]) -> float:
    if not vertices:
        return math.inf
    if not p:
        return 0.0
    exact = all(isinstance(c, Fraction) for c in p) and all(isinstance(c, Fraction) for v in vertices for c in v)
    if exact and geo.in_hull_exact(p, vertices):  # type: ignore[arg-type]
        return 0.0
    return geo.hull_distance(p, vertices)


def _coverage_gap(
    S: EquationalSystem, R: GeometricRealization, a: str, p: Point, depth: int, eps: float, cap: int
) -> float:
    """Distance from ``p`` to the nearest depth-``depth`` cell, searching only
    inside cells that already come within ``eps`` of it."""
    M = S.module
    stack = [(0, a, _identity_composite(R, a))]
    missed = math.inf
    visited = 0
    while stack:
        k, b, comp = stack.pop()
        if k == depth:
            g = _point_gap(p, comp.image(R.domains[b]))
            if g <= eps:
                return g
            missed = min(missed, g)
            continue
        for m in reversed(M.into(b)):
            c = M.src(m)
            child = comp.then_inner(R.sector_maps[m])
            g = _point_gap(p, child.image(R.domains[c]))
            visited += 1
            if visited > cap:
                raise ResourceCapExceeded("coverage audit", cap)
            # sampled images of curved cells can miss a point their parent
            # covers, so only affine realizations are pruned
            if g <= eps or not R.affine:
                stack.append((k + 1, c, child))
            else:
                missed = min(missed, g)
    return missed


def crude_verify(
    S: EquationalSystem,
    R: GeometricRealization,
    *,
    depth: int = 3,
    eps: float = 1e-9,
    budget: int | None = None,
) -> CrudeCertificate | CrudeFailure:
    """Certificate when every gluing map contracts and depth-``depth`` cells cover each domain."""
    report = check_realization(S, R)
    if not report.ok:
        return CrudeFailure("realization invalid", report.to_json())
    empty = [a for a in S.category.objects if R.domains[a].empty]
    if empty:
        return CrudeFailure("empty domain", {"objects": empty})
    try:
        factors = contraction_factors(S, R)
    except PreconditionError as exc:
        return CrudeFailure("contraction audit", {"message": str(exc)})
    worst = max(factors, key=lambda m: (factors[m].value, m)) if factors else None
    lam = factors[worst].value if worst else 0.0
    exact = None
    if worst and all(c.exact is not None for c in factors.values()):
        exact = max(c.exact for c in factors.values())  # type: ignore[type-var]
    if lam >= 1.0 - (0.0 if exact is not None else R.tol):
        return CrudeFailure("not a contraction", {"lambda": lam, "sector": worst})
    cap = default_budget() if budget is None else budget
    gap = 0.0
    for a in sorted(_live_objects(S)):
        dom = R.domains[a]
        pts = list(dom.samples) if dom.samples else sample_points(dom, 4, interior=dom.fills)
        for p in pts:
            g = _coverage_gap(S, R, a, p, depth, eps, cap)
            gap = max(gap, g)
            if g > eps:
                return CrudeFailure("coverage gap", {"object": a, "point": _fmt_point(p), "gap": g, "eps": eps})
    return CrudeCertificate(lam, exact, depth, eps, gap)


# ---- diameter decay ----


@dataclass(frozen=True)
class DecayResult:
    base_object: str
    sq_sup: tuple[Number, ...]
    expanded: int

    @property
    def sup(self) -> tuple[float, ...]:
        return tuple(math.sqrt(float(v)) for v in self.sq_sup)

    @property
    def inf(self) -> float:
        return min(self.sup)

    def to_json(self) -> dict:
        return {
            "object": self.base_object,
            "sup": list(self.sup),
            "sup_squared": [geo.fmt_number(v) for v in self.sq_sup],
            "inf": self.inf,
            "expanded": self.expanded,
        }


def _simplicial(R: GeometricRealization) -> bool:
    if not (R.rational and R.affine):
        return False
    return all(
        d.vertices and geo.affine_rank(d.vertices) == len(d.vertices) - 1 for d in R.domains.values()
    )


def diameter_decay(
    S: EquationalSystem, R: GeometricRealization, a: str, N: int, budget: int | None = None
) -> DecayResult:
    """Largest cell diameter at each depth 0..N.

    Cells never grow under refinement, so a best-first search on squared
    diameter meets the largest depth-n cell before any smaller cell of any
    depth; whole subtrees of small cells are never expanded.
    """
    cap = default_budget() if budget is None else budget
    M = S.module
    if _simplicial(R):
        return _decay_simplicial(S, R, a, N, cap)
    heap: list[tuple[Any, int, int, str, _Composite]] = []
    dom = R.domains[a]
    start = geo.sq_diameter(dom.vertices)
    counter = 0
    heap.append((-start, 0, counter, a, _identity_composite(R, a)))
    best: dict[int, Number] = {}
    expanded = 0
    while heap and len(best) <= N:
        key, depth, _, b, comp = heapq.heappop(heap)
        if depth not in best:
            best[depth] = -key
        if depth == N:
            continue
        expanded += 1
        if expanded > cap:
            raise ResourceCapExceeded("diameter decay cells", cap)
        for m in M.into(b):
            c = M.src(m)
            child = comp.then_inner(R.sector_maps[m])
            counter += 1
            heapq.heappush(heap, (-geo.sq_diameter(child.image(R.domains[c])), depth + 1, counter, c, child))
    return DecayResult(a, tuple(best.get(n, 0) for n in range(N + 1)), expanded)


def _decay_simplicial(
    S: EquationalSystem, R: GeometricRealization, a: str, N: int, cap: int
) -> DecayResult:
    """Same search, with a cell stored as its matrix of squared edge lengths.

    In a simplex the position of a subcell is fixed by the barycentric
    coordinates of its vertices, so child edge lengths follow from the parent's
    through the identity |Σ μᵢ vᵢ|² = −½ Σ μᵢ μⱼ Dᵢⱼ for Σ μᵢ = 0.  Congruent
    labelled cells collapse to one search state.
    """
    M = S.module
    coords: dict[str, list[tuple[Fraction, ...]]] = {}
    for m in M.sectors:
        b, t = M.sectors[m]
        target = R.domains[t].vertices
        lam = []
        for v in R.domains[b].vertices:
            w = geo.barycentric(R.sector_maps[m](v), target)  # type: ignore[arg-type]
            if w is None:
                raise PreconditionError(f"sector {m} leaves the affine hull of its target")
            lam.append(tuple(w))
        coords[m] = lam

    # for each sector and each child edge (s, t): the terms of −½ μᵀ D μ
    terms: dict[str, list[tuple[int, int, list[tuple[int, int, Fraction]]]]] = {}
    for m, lam in coords.items():
        rows = []
        for s_, t_ in combinations(range(len(lam)), 2):
            mu = [x - y for x, y in zip(lam[s_], lam[t_])]
            nz = [i for i, v in enumerate(mu) if v != 0]
            rows.append((s_, t_, [(i, j, -mu[i] * mu[j]) for i, j in combinations(nz, 2)]))
        terms[m] = rows

    def child(D: tuple[tuple[Fraction, ...], ...], m: str) -> tuple:
        k = len(coords[m])
        rows = [[Fraction(0)] * k for _ in range(k)]
        for s_, t_, coeffs in terms[m]:
            val = sum((c * D[i][j] for i, j, c in coeffs), Fraction(0))
            rows[s_][t_] = rows[t_][s_] = val
        return tuple(tuple(r) for r in rows)

    verts = R.domains[a].vertices
    D0 = tuple(tuple(geo.sqdist(v, w) for w in verts) for v in verts)
    diam = lambda D: max((x for r in D for x in r), default=Fraction(0))  # noqa: E731
    heap: list[tuple[Any, int, int, str, tuple]] = [(-diam(D0), 0, 0, a, D0)]
    seen: set[tuple[int, str, tuple]] = set()
    best: dict[int, Number] = {}
    counter = 0
    expanded = 0
    while heap and len(best) <= N:
        key, depth, _, b, D = heapq.heappop(heap)
        if depth not in best:
            best[depth] = -key
        if depth == N:
            continue
        expanded += 1
        if expanded > cap:
            raise ResourceCapExceeded("diameter decay cells", cap)
        for m in M.into(b):
            c = M.src(m)
            Dc = child(D, m)
            state = (depth + 1, c, Dc)
            if state in seen:
                continue
            seen.add(state)
            counter += 1
            heapq.heappush(heap, (-diam(Dc), depth + 1, counter, c, Dc))
    return DecayResult(a, tuple(best.get(n, Fraction(0)) for n in range(N + 1)), expanded)


# ---- approximant sets ----


@dataclass(frozen=True)
class ApproximantSets:
    base_object: str
    element: str
    sets: tuple[tuple[Point, ...], ...]
    nested: bool
    empty_at: int | None = None

    def diameters(self) -> list[float]:
        return [math.sqrt(float(geo.sq_diameter(K))) if K else 0.0 for K in self.sets]

    def to_json(self) -> dict:
        return {
            "object": self.base_object,
            "element": self.element,
            "sets": [[_fmt_point(p) for p in K] for K in self.sets],
            "diameters": self.diameters(),
            "nested": self.nested,
            "empty_at": self.empty_at,
        }


def approximant_sets(
    S: EquationalSystem, R: GeometricRealization, C: Coalgebra, a: str, x: str, N: int
) -> ApproximantSets:
    """K₀(y) is the whole domain; K_{n+1}(y) intersects the images ψ_m K_n(z)
    over every representative (m, z) of the structure class of y."""
    if not R.affine:
        raise PreconditionError("approximant sets need affine gluing maps")
    X = C.carrier
    elems = [(b, y) for b in S.category.objects for y in X(b)]
    K: dict[tuple[str, str], list[Point]] = {
        (b, y): geo.canonical_polytope(R.domains[b].vertices) for b, y in elems
    }
    history = [tuple(K[(a, x)])]
    nested = True
    empty_at = None
    for n in range(1, N + 1):
        new: dict[tuple[str, str], list[Point]] = {}
        for b, y in elems:
            if (b, y) in C.boundary:
                new[(b, y)] = K[(b, y)]
                continue
            region: list[Point] | None = None
            for m, z in C.representatives(b, y):
                img = geo.canonical_polytope([R.sector_maps[m](p) for p in K[(S.module.src(m), z)]])
                region = img if region is None else geo.intersect_convex(region, img)
                if not region:
                    break
            new[(b, y)] = region or []
        for key, region in new.items():
            if region and not all(geo.in_hull(p, K[key], R.tol) for p in region):
                nested = False
        K = new
        history.append(tuple(K[(a, x)]))
        if not K[(a, x)] and empty_at is None:
            empty_at = n
    return ApproximantSets(a, x, tuple(history), nested, empty_at)


# ---- rendering ----


def full_cells(S: EquationalSystem, R: GeometricRealization, a: str, depth: int, budget: int | None = None) -> list[Cell]:
    """Depth-``depth`` cells whose affine dimension equals that of the domain."""
    tree = CellTree.build(S, R, a, depth, budget)
    top = geo.affine_rank(R.domains[a].vertices)
    return [c for c in tree.cells(depth) if geo.affine_rank(c.vertices) == top]


def _fmt_coord(c: Number) -> str:
    v = geo.fmt_number(c)
    return v if isinstance(v, str) else repr(round(v, 12))


def render_csv(cells: Sequence[Cell], depth: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["depth", "address", "vertices"])
    for cell in cells:
        verts = geo.canonical_polytope(cell.vertices)
        w.writerow(
            [depth, " ".join(cell.address), ";".join(" ".join(_fmt_coord(c) for c in v) for v in verts)]
        )
    return buf.getvalue()


def _depth_color(depth: int, top: int) -> str:
    from matplotlib import colormaps
    from matplotlib.colors import to_hex

    return to_hex(colormaps["viridis"](depth / max(top, 1)))


def render_svg(cells: Sequence[Cell], depth: int, dim: int, size: int = 512) -> str:
    if dim > 2:
        raise PreconditionError("SVG output supports dimension at most 2; use CSV")
    pts = [tuple(float(c) for c in v) for cell in cells for v in cell.vertices]
    if dim == 2:
        xs, ys = [p[0] for p in pts] or [0.0], [p[1] for p in pts] or [0.0]
    else:
        xs, ys = ([p[0] for p in pts] if dim == 1 else [0.0]) or [0.0], [0.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1e-12)
    pad = 8.0
    scale = (size - 2 * pad) / span

    def X(x: float) -> float:
        return round(pad + (x - x0) * scale, 4)

    def Y(y: float) -> float:
        return round(size - pad - (y - y0) * scale, 4)

    color = _depth_color(depth, depth)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<g fill="{color}" stroke="#222222" stroke-width="0.3">',
    ]
    for cell in cells:
        label = " ".join(cell.address)
        verts = [tuple(float(c) for c in v) for v in geo.canonical_polytope(cell.vertices)]
        if dim == 2:
            path = " ".join(f"{X(p[0])},{Y(p[1])}" for p in verts)
            lines.append(f'<polygon class="cell" data-address="{_xml(label)}" points="{path}"/>')
        elif dim == 1:
            a, b = verts[0][0], verts[-1][0]
            path = f"{X(a)},{size / 2 - 6} {X(b)},{size / 2 - 6} {X(b)},{size / 2 + 6} {X(a)},{size / 2 + 6}"
            lines.append(f'<polygon class="cell" data-address="{_xml(label)}" points="{path}"/>')
        else:
            lines.append(f'<circle class="cell" data-address="{_xml(label)}" cx="{size / 2}" cy="{size / 2}" r="4"/>')
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _xml(s: str) -> str:
    return s.replace("&", "&amp;").replace('"', "&quot;").replace("<", "&lt;").replace(">", "&gt;")


def render(
    S: EquationalSystem,
    R: GeometricRealization,
    a: str,
    depth: int,
    format: str = "csv",
    budget: int | None = None,
) -> str:
    cells = full_cells(S, R, a, depth, budget)
    if format == "csv":
        return render_csv(cells, depth)
    if format == "svg":
        return render_svg(cells, depth, R.domains[a].dim)
    raise PreconditionError(f"unknown render format {format!r}")


def render_figure(
    S: EquationalSystem,
    R: GeometricRealization,
    a: str,
    depth: int,
    path: str,
    budget: int | None = None,
) -> str:
    """PNG of the cells at every depth up to ``depth``, coloured by depth."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.collections import PolyCollection

    dim = R.domains[a].dim
    if dim > 2:
        raise PreconditionError("figures support dimension at most 2")
    tree = CellTree.build(S, R, a, depth, budget)
    top = geo.affine_rank(R.domains[a].vertices)
    fig, ax = plt.subplots(figsize=(5, 5) if dim == 2 else (6, 2.5))
    for n in range(depth + 1):
        polys = []
        for cell in tree.cells(n):
            if geo.affine_rank(cell.vertices) != top:
                continue
            verts = [tuple(float(c) for c in v) for v in geo.canonical_polytope(cell.vertices)]
            if dim == 2:
                polys.append(verts)
            elif dim == 1:
                lo, hi = verts[0][0], verts[-1][0]
                polys.append([(lo, n), (hi, n), (hi, n + 0.8), (lo, n + 0.8)])
        if polys:
            ax.add_collection(
                PolyCollection(
                    polys,
                    facecolors=_depth_color(n, depth),
                    edgecolors="black",
                    linewidths=0.2,
                    alpha=0.35 if dim == 2 and n < depth else 1.0,
                )
            )
    ax.autoscale_view()
    if dim == 2:
        ax.set_aspect("equal")
    else:
        ax.set_ylabel("depth")
    ax.set_title(f"{S.name or 'system'}: cells at {a}, depth ≤ {depth}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def decay_figure(result: DecayResult, path: str, ratio: float | None = None) -> str:
    """Log plot of the largest cell diameter per depth, with an optional geometric bound."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    depths = list(range(len(result.sup)))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.semilogy(depths, [max(v, 1e-300) for v in result.sup], "o-", label="largest cell")
    if ratio is not None:
        ax.semilogy(depths, [result.sup[0] * ratio**n for n in depths], "--", label=f"{ratio:.4g}ⁿ bound")
    ax.set_xlabel("depth")
    ax.set_ylabel("diameter")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
