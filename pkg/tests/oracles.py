"""Independent reference computations used to cross-check the library.

None of these import the algorithm they check; they work from raw tables with
the most direct method available, trading speed for obviousness.
"""

from __future__ import annotations

from collections import deque
from itertools import product

import numpy as np


def category_axioms_hold(objects, arrows, table) -> bool:
    """``arrows`` maps id -> (src, tgt) including identities ``id_<obj>``."""
    ident = {a: f"id_{a}" for a in objects}
    for g, (gs, gt) in arrows.items():
        for f, (fs, ft) in arrows.items():
            if ft != gs:
                continue
            h = table.get((g, f))
            if h is None or arrows.get(h) != (fs, gt):
                return False
    for f, (s, t) in arrows.items():
        if table.get((ident[t], f)) != f or table.get((f, ident[s])) != f:
            return False
    for h, g, f in product(arrows, repeat=3):
        if arrows[f][1] == arrows[g][0] and arrows[g][1] == arrows[h][0]:
            if table[(h, table[(g, f)])] != table[(table[(h, g)], f)]:
                return False
    return True


def tensor_partition(sectors, right, on_objects, on_arrows, arrows) -> dict[str, set[frozenset]]:
    """Classes of (m, x) under (m·g, x) ~ (m, g·x), by boolean transitive closure.

    ``sectors`` maps id -> (src, tgt); ``arrows`` maps id -> (src, tgt) and
    includes identities, which act trivially.
    """
    pairs = [(m, x) for m, (b, _) in sorted(sectors.items()) for x in on_objects[b]]
    idx = {p: i for i, p in enumerate(pairs)}
    n = len(pairs)
    R = np.eye(n, dtype=bool)
    for m, (b, _) in sectors.items():
        for g, (c, t) in arrows.items():
            if t != b:
                continue
            for x in on_objects[c]:
                mg = m if g.startswith("id_") else right[(m, g)]
                gx = x if g.startswith("id_") else on_arrows[(g, x)]
                i, j = idx[(mg, x)], idx[(m, gx)]
                R[i, j] = R[j, i] = True
    # Warshall closure
    for k in range(n):
        R |= np.outer(R[:, k], R[k, :])
    out: dict[str, set[frozenset]] = {a: set() for _, a in sectors.values()}
    for i, (m, _) in enumerate(pairs):
        out[sectors[m][1]].add(frozenset(pairs[j] for j in range(n) if R[i, j]))
    return out


def chains(sectors, a, n):
    """Every length-n chain of sectors ending at ``a``, built one rung at a time."""
    if n == 0:
        return [()]
    out = []
    for head in sorted(m for m, (_, t) in sectors.items() if t == a):
        for rest in chains(sectors, sectors[head][0], n - 1):
            out.append((head,) + rest)
    return out


def ladder_targets(sectors, arrows, left, right, a, c):
    """All c' reachable from c by one ladder, trying every arrow and sector per rung."""
    def act_left(f, m):
        return m if f.startswith("id_") else left[(f, m)]

    def act_right(m, f):
        return m if f.startswith("id_") else right[(m, f)]

    results = set()
    stack = [(0, f"id_{a}", ())]
    while stack:
        i, f_prev, built = stack.pop()
        if i == len(c):
            results.add(built)
            continue
        lhs = act_left(f_prev, c[i])
        for f, (s, t) in arrows.items():
            if s != sectors[c[i]][0]:
                continue
            for m2, (b2, a2) in sectors.items():
                if b2 == t and a2 == arrows[f_prev][1] and act_right(m2, f) == lhs:
                    stack.append((i + 1, f, built + (m2,)))
    return results


def roof_distances(nodes, succ, source):
    """BFS where one step joins x and y through a common source B (B -> x, B -> y, identities allowed)."""
    preds = {v: {v} for v in nodes}
    for v in nodes:
        for w in succ[v]:
            preds[w].add(v)
    dist = {source: 0}
    q = deque([source])
    while q:
        v = q.popleft()
        for apex in preds[v]:
            for w in {apex} | succ[apex]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    q.append(w)
    return dist


def matrix_walk_count(T: np.ndarray, a: int, n: int) -> int:
    """Number of length-n backward chains ending at index ``a``: column sums of T^n."""
    v = np.zeros(T.shape[0], dtype=object)
    v[a] = 1
    for _ in range(n):
        v = T.T.dot(v)
    return int(sum(v))
