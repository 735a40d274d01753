"""Small exact-or-float geometry kit: affine maps, hull membership, convex
intersections in low dimension."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Sequence, Union

import math

import numpy as np
from scipy.optimize import nnls

Number = Union[Fraction, float, int]
Point = tuple[Number, ...]


def to_number(v: object, rational: bool) -> Number:
    if rational:
        if isinstance(v, float):
            return Fraction(v).limit_denominator(10**12)
        return Fraction(str(v)) if isinstance(v, str) else Fraction(v)  # type: ignore[arg-type]
    return float(Fraction(v)) if isinstance(v, str) else float(v)  # type: ignore[arg-type]


def fmt_number(v: Number) -> str | float:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return float(v)


def sub(p: Sequence[Number], q: Sequence[Number]) -> Point:
    return tuple(a - b for a, b in zip(p, q))


def dot(p: Sequence[Number], q: Sequence[Number]) -> Number:
    return sum((a * b for a, b in zip(p, q)), Fraction(0) if p and isinstance(p[0], Fraction) else 0)


def sqdist(p: Sequence[Number], q: Sequence[Number]) -> Number:
    d = sub(p, q)
    return dot(d, d)


def sq_diameter(points: Sequence[Sequence[Number]]) -> Number:
    best: Number = 0
    for p, q in combinations(points, 2):
        d = sqdist(p, q)
        if d > best:
            best = d
    return best


class AffineMap:
    """``x ↦ A x + b`` with ``A`` of shape (target dim, source dim)."""

    __slots__ = ("A", "b")

    def __init__(self, A: Sequence[Sequence[Number]], b: Sequence[Number]) -> None:
        self.A = tuple(tuple(row) for row in A)
        self.b = tuple(b)

    @property
    def target_dim(self) -> int:
        return len(self.b)

    @property
    def source_dim(self) -> int:
        return len(self.A[0]) if self.A else 0

    def __call__(self, p: Sequence[Number]) -> Point:
        return tuple(
            sum((a * x for a, x in zip(row, p)), type(c)(0)) + c for row, c in zip(self.A, self.b)
        )

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """``self ∘ inner``."""
        cols = inner.source_dim
        A = []
        for row in self.A:
            A.append(
                tuple(
                    sum((row[k] * inner.A[k][j] for k in range(len(row))), type(self.b[0])(0) if self.b else 0)
                    for j in range(cols)
                )
            )
        return AffineMap(A, self(inner.b))

    def to_json(self) -> dict:
        return {
            "A": [[fmt_number(v) for v in row] for row in self.A] if self.A else [[]],
            "b": [fmt_number(v) for v in self.b],
        }


def identity_map(dim: int, rational: bool) -> AffineMap:
    one = Fraction(1) if rational else 1.0
    zero = Fraction(0) if rational else 0.0
    return AffineMap([[one if i == j else zero for j in range(dim)] for i in range(dim)], [zero] * dim)


def solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Unique solution of a square-or-tall consistent system, else None."""
    n = len(rows[0]) if rows else 0
    M = [list(r) + [v] for r, v in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            return None
        M[r], M[p] = M[p], M[r]
        pv = M[r][c]
        M[r] = [v / pv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, len(M)):
        if M[i][-1] != 0:
            return None
    return [M[i][-1] for i in range(n)]


def affine_rank(points: Sequence[Sequence[Number]]) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    rows = [list(sub(p, base)) for p in points[1:]]
    if isinstance(base[0] if base else 0, Fraction) or not base:
        return _rank_exact([[Fraction(v) for v in r] for r in rows])
    return int(np.linalg.matrix_rank(np.array(rows, dtype=float), tol=1e-9))


def _rank_exact(rows: list[list[Fraction]]) -> int:
    M = [r[:] for r in rows if r]
    if not M:
        return 0
    rank = 0
    cols = len(M[0])
    for c in range(cols):
        p = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[rank], M[p] = M[p], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][c] != 0:
                f = M[i][c] / M[rank][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


def barycentric(point: Sequence[Fraction], simplex: Sequence[Sequence[Fraction]]) -> list[Fraction] | None:
    """Exact barycentric coordinates with respect to affinely independent vertices."""
    k = len(simplex)
    if k == 1:
        return [Fraction(1)] if tuple(point) == tuple(simplex[0]) else None
    dim = len(point)
    rows = [[simplex[j][i] for j in range(k)] for i in range(dim)]
    rows.append([Fraction(1)] * k)
    return solve_exact(rows, list(point) + [Fraction(1)])


def in_hull_exact(point: Sequence[Fraction], vertices: Sequence[Sequence[Fraction]]) -> bool:
    """Carathéodory search over affinely independent vertex subsets."""
    pts = list(dict.fromkeys(tuple(v) for v in vertices))
    if not pts:
        return False
    if tuple(point) in pts:
        return True
    if affine_rank(pts) == len(pts) - 1:
        lam = barycentric(point, pts)
        return lam is not None and all(v >= 0 for v in lam)
    dim = len(point)
    top = min(len(pts), dim + 1)
    for size in range(2, top + 1):
        for subset in combinations(pts, size):
            if affine_rank(subset) != size - 1:
                continue
            lam = barycentric(point, subset)
            if lam is not None and all(v >= 0 for v in lam):
                return True
    return False


def _segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    d = b - a
    L = float(d @ d)
    t = 0.0 if L == 0 else min(1.0, max(0.0, float((p - a) @ d) / L))
    return float(np.linalg.norm(p - (a + t * d)))


def hull_distance(point: Sequence[Number], vertices: Sequence[Sequence[Number]]) -> float:
    """Euclidean distance from a point to the convex hull of vertices (float)."""
    if not point:
        return 0.0 if vertices else math.inf
    dim = len(point)
    if dim == 1:
        lo = min(float(v[0]) for v in vertices)
        hi = max(float(v[0]) for v in vertices)
        x = float(point[0])
        return max(lo - x, x - hi, 0.0)
    if dim == 2:
        fl = [(float(v[0]), float(v[1])) for v in vertices]
        hull = hull2d(fl)
        p = np.array([float(c) for c in point])
        if len(hull) >= 3 and all(_cross(hull[i], hull[(i + 1) % len(hull)], tuple(p)) >= 0 for i in range(len(hull))):
            return 0.0
        pts = [np.array(h) for h in hull]
        if len(pts) == 1:
            return float(np.linalg.norm(p - pts[0]))
        edges = [(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]
        return min(_segment_distance(p, a, b) for a, b in edges)
    V = np.array([[float(c) for c in v] for v in vertices], dtype=float)
    p = np.array([float(c) for c in point], dtype=float)
    if V.size == 0 or V.shape[1] == 0:
        return 0.0
    weight = 1e4 * (1.0 + float(np.abs(V).max()))
    A = np.vstack([V.T, weight * np.ones((1, V.shape[0]))])
    rhs = np.concatenate([p, [weight]])
    lam, _ = nnls(A, rhs)
    lam = lam / lam.sum() if lam.sum() > 0 else lam
    return float(np.linalg.norm(V.T @ lam - p))


def in_hull(point: Sequence[Number], vertices: Sequence[Sequence[Number]], tol: float) -> bool:
    if point and all(isinstance(c, Fraction) for c in point) and all(
        isinstance(c, Fraction) for v in vertices for c in v
    ):
        return in_hull_exact(point, vertices)  # type: ignore[arg-type]
    if not point:
        return bool(vertices)
    return hull_distance(point, vertices) <= tol  # type: ignore[arg-type]


def direction_basis(vertices: Sequence[Sequence[Number]]) -> np.ndarray:
    """Orthonormal basis (columns) of the span of vertex differences."""
    if len(vertices) <= 1 or not vertices[0]:
        return np.zeros((len(vertices[0]) if vertices else 0, 0))
    base = np.array([float(c) for c in vertices[0]])
    D = np.array([[float(c) for c in v] for v in vertices[1:]]) - base
    if not np.any(D):
        return np.zeros((len(base), 0))
    U, s, _ = np.linalg.svd(D.T, full_matrices=False)
    rank = int((s > 1e-12 * max(1.0, s.max())).sum())
    return U[:, :rank]


def spectral_norm(B: np.ndarray, tol: float = 1e-9, max_iter: int = 10000) -> float:
    """Largest singular value by power iteration on BᵀB."""
    if B.size == 0:
        return 0.0
    G = B.T @ B
    v = np.ones(G.shape[0]) / np.sqrt(G.shape[0])
    v = v + 1e-3 * np.arange(G.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = G @ v
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v_new = w / nw
        lam_new = float(v_new @ G @ v_new)
        if abs(lam_new - lam) <= tol * max(1.0, lam_new) and np.linalg.norm(v_new - v) < 1e-6:
            lam = lam_new
            break
        v, lam = v_new, lam_new
    return float(np.sqrt(max(lam, 0.0)))


def exact_similarity_ratio(
    A: AffineMap, vertices: Sequence[Sequence[Fraction]]
) -> Fraction | None:
    """If ``A`` scales every direction of the domain by one factor c, return c²."""
    if len(vertices) <= 1:
        return Fraction(0)
    base = vertices[0]
    dirs = [sub(v, base) for v in vertices[1:]]
    lin = AffineMap(A.A, [Fraction(0)] * A.target_dim)
    images = [lin(d) for d in dirs]
    ratio: Fraction | None = None
    for i, j in combinations(range(len(dirs)), 2):
        if dot(images[i], images[j]) != 0 and dot(dirs[i], dirs[j]) == 0:
            return None
    for i in range(len(dirs)):
        for j in range(i, len(dirs)):
            g = dot(dirs[i], dirs[j])
            h = dot(images[i], images[j])
            if g == 0:
                if h != 0:
                    return None
                continue
            r = Fraction(h) / Fraction(g)
            if ratio is None:
                ratio = r
            elif ratio != r:
                return None
    return ratio


def fraction_sqrt(q: Fraction) -> Fraction | None:
    from math import isqrt

    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


# ---- two-dimensional convex sets (possibly degenerate) ----


def _cross(o: Sequence[Number], a: Sequence[Number], b: Sequence[Number]) -> Number:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def hull2d(points: Sequence[Sequence[Number]]) -> list[Point]:
    """Convex hull in counter-clockwise order without collinear points."""
    pts = sorted(set(tuple(p) for p in points))
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:
        return [pts[0], pts[-1]]
    return hull


def _on_segment(p: Point, a: Point, b: Point) -> bool:
    return (
        _cross(a, b, p) == 0
        and min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def in_convex2d(p: Point, hull: Sequence[Point]) -> bool:
    if not hull:
        return False
    if len(hull) == 1:
        return tuple(p) == tuple(hull[0])
    if len(hull) == 2:
        return _on_segment(tuple(p), tuple(hull[0]), tuple(hull[1]))
    n = len(hull)
    return all(_cross(hull[i], hull[(i + 1) % n], p) >= 0 for i in range(n))


def _edges(hull: Sequence[Point]) -> list[tuple[Point, Point]]:
    if len(hull) == 1:
        return [(hull[0], hull[0])]
    if len(hull) == 2:
        return [(hull[0], hull[1])]
    return [(hull[i], hull[(i + 1) % len(hull)]) for i in range(len(hull))]


def _segment_meet(a: Point, b: Point, c: Point, d: Point) -> list[Point]:
    r = sub(b, a)
    s = sub(d, c)
    denom = r[0] * s[1] - r[1] * s[0]
    qp = sub(c, a)
    if denom == 0:
        out = [p for p in (a, b) if _on_segment(p, c, d)]
        out += [p for p in (c, d) if _on_segment(p, a, b)]
        return out
    t = (qp[0] * s[1] - qp[1] * s[0]) / denom
    u = (qp[0] * r[1] - qp[1] * r[0]) / denom
    if 0 <= t <= 1 and 0 <= u <= 1:
        return [(a[0] + t * r[0], a[1] + t * r[1])]
    return []


def intersect2d(P: Sequence[Point], Q: Sequence[Point]) -> list[Point]:
    """Exact intersection of two convex hulls in the plane."""
    hp, hq = hull2d(P), hull2d(Q)
    cand = [p for p in hp if in_convex2d(p, hq)] + [q for q in hq if in_convex2d(q, hp)]
    for a, b in _edges(hp):
        for c, d in _edges(hq):
            cand.extend(_segment_meet(a, b, c, d))
    return hull2d(cand) if cand else []


def intersect_convex(P: Sequence[Point], Q: Sequence[Point]) -> list[Point]:
    """Intersection of convex hulls given by vertex lists, for ambient dim ≤ 2."""
    if not P or not Q:
        return []
    dim = len(P[0])
    if dim == 0:
        return [()]
    if dim == 1:
        lo = max(min(p[0] for p in P), min(q[0] for q in Q))
        hi = min(max(p[0] for p in P), max(q[0] for q in Q))
        if lo > hi:
            return []
        return [(lo,)] if lo == hi else [(lo,), (hi,)]
    if dim == 2:
        return intersect2d(P, Q)
    raise NotImplementedError("convex intersection is only implemented up to dimension 2")


def canonical_polytope(points: Sequence[Sequence[Number]]) -> list[Point]:
    """Vertex list with redundant points removed (exact up to dimension 2)."""
    if not points:
        return []
    dim = len(points[0])
    if dim == 0:
        return [()]
    if dim == 1:
        lo, hi = min(p[0] for p in points), max(p[0] for p in points)
        return [(lo,)] if lo == hi else [(lo,), (hi,)]
    if dim == 2:
        return hull2d(points)
    return sorted(set(tuple(p) for p in points))
