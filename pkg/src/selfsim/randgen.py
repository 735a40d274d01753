"""Random small systems and set functors, for property tests.

Everything is built from concrete functions between small finite sets, so the
category laws, the module actions and functoriality hold by construction.
Arrows out of ``a`` are functions on ``range(size[a])``; sectors b ⇸ a are
functions from ``range(size[b])`` to ``range(size[a])``; an element of X(a) is
a function from a fixed set T into ``range(size[a])``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .fincat import FinCategory, SetFunctor
from .finmod import EquationalSystem, Module

Fn = tuple[int, ...]


def _compose(g: Fn, f: Fn) -> Fn:
    return tuple(g[i] for i in f)


def _fn_id(prefix: str, src: str, tgt: str, f: Fn) -> str:
    return f"{prefix}{src}{tgt}:{''.join(map(str, f))}"


@dataclass(frozen=True)
class RandomInstance:
    system: EquationalSystem
    functor: SetFunctor
    seed: int


def _close(
    gens: dict[tuple[str, str], set[Fn]], arrows: dict[tuple[str, str], set[Fn]], objects: list[str], cap: int
) -> dict[tuple[str, str], set[Fn]]:
    """Close a family of function sets under pre- and post-composition with ``arrows``."""
    out = {k: set(v) for k, v in gens.items()}
    changed = True
    while changed:
        changed = False
        for (b, a), ms in list(out.items()):
            for m in list(ms):
                for c in objects:
                    for g in arrows.get((c, b), ()):
                        new = _compose(m, g)
                        if new not in out.setdefault((c, a), set()):
                            out[(c, a)].add(new)
                            changed = True
                    for d in objects:
                        for f in arrows.get((a, d), ()):
                            new = _compose(f, m)
                            if new not in out.setdefault((b, d), set()):
                                out[(b, d)].add(new)
                                changed = True
        if sum(len(v) for v in out.values()) > cap:
            raise OverflowError
    return out


def _random_category(rng: random.Random, objects: list[str], size: dict[str, int]) -> dict[tuple[str, str], set[Fn]]:
    arrows: dict[tuple[str, str], set[Fn]] = {(a, a): {tuple(range(size[a]))} for a in objects}
    for _ in range(rng.randint(0, 3)):
        s, t = rng.choice(objects), rng.choice(objects)
        arrows.setdefault((s, t), set()).add(tuple(rng.randrange(size[t]) for _ in range(size[s])))
    # closing under composition only needs post-composition by the same family
    return _close(arrows, arrows, objects, 40)


def random_instance(seed: int, max_objects: int = 3, max_fiber: int = 4) -> RandomInstance:
    """A random system and functor; retries internally until the size limits hold."""
    rng = random.Random(seed)
    while True:
        try:
            inst = _attempt(rng, seed, max_objects, max_fiber)
        except OverflowError:
            continue
        if inst is not None:
            return inst


def _attempt(rng: random.Random, seed: int, max_objects: int, max_fiber: int) -> RandomInstance | None:
    objects = [str(i) for i in range(rng.randint(1, max_objects))]
    size = {a: rng.randint(1, 2) for a in objects}
    arrows = _random_category(rng, objects, size)

    sector_gens: dict[tuple[str, str], set[Fn]] = {}
    for _ in range(rng.randint(1, 3)):
        b, a = rng.choice(objects), rng.choice(objects)
        sector_gens.setdefault((b, a), set()).add(tuple(rng.randrange(size[a]) for _ in range(size[b])))
    sectors = _close(sector_gens, arrows, objects, 24)

    t_size = rng.randint(1, 2)
    elem_gens: dict[tuple[str, str], set[Fn]] = {}
    for a in objects:
        for _ in range(rng.randint(1, 2)):
            elem_gens.setdefault(("T", a), set()).add(tuple(rng.randrange(size[a]) for _ in range(t_size)))
    # elements only need post-composition, so pretend T is an object with no arrows in
    elements = _close(elem_gens, arrows, objects, 4 * len(objects))
    fibers = {a: sorted(elements.get(("T", a), set())) for a in objects}
    if any(len(v) > max_fiber for v in fibers.values()):
        return None

    arrow_ids = {}
    arrow_list = []
    for (s, t), fs in sorted(arrows.items()):
        for f in sorted(fs):
            if s == t and f == tuple(range(size[s])):
                arrow_ids[(s, t, f)] = f"id_{s}"
                continue
            ident = _fn_id("f", s, t, f)
            arrow_ids[(s, t, f)] = ident
            arrow_list.append((ident, s, t, f))
    compose = {}
    for gid, b, c, g in arrow_list:
        for fid, a, b2, f in arrow_list:
            if b2 == b:
                compose[(gid, fid)] = arrow_ids[(a, c, _compose(g, f))]
    cat = FinCategory(objects, [(i, s, t) for i, s, t, _ in arrow_list], compose)

    sec_ids = {}
    sector_list = []
    for (b, a), ms in sorted(sectors.items()):
        for m in sorted(ms):
            ident = _fn_id("m", b, a, m)
            sec_ids[(b, a, m)] = ident
            sector_list.append((ident, b, a, m))
    left = {}
    right = {}
    for mid, b, a, m in sector_list:
        for fid, s, t, f in arrow_list:
            if s == a:
                left[(fid, mid)] = sec_ids[(b, t, _compose(f, m))]
            if t == b:
                right[(mid, fid)] = sec_ids[(s, a, _compose(m, f))]
    module = Module(cat, [(i, b, a) for i, b, a, _ in sector_list], left, right)

    def eid(x: Fn) -> str:
        return "x" + "".join(map(str, x))

    on_objects = {a: [eid(x) for x in fibers[a]] for a in objects}
    on_arrows = {}
    for fid, s, t, f in arrow_list:
        for x in fibers[s]:
            on_arrows[(fid, eid(x))] = eid(_compose(f, x))
    X = SetFunctor(cat, on_objects, on_arrows)
    return RandomInstance(EquationalSystem(cat, module, f"random-{seed}"), X, seed)

