"""Discrete equational systems: liveness, singletons, and the Empty/Cantor split."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

import numpy as np

from ._support import PreconditionError
from .fincat import FinCategory
from .finmod import EquationalSystem, Module


@dataclass(frozen=True)
class DiscreteSystem:
    """Objects with a finite set of sectors ``M[(b, a)]`` from b into a."""

    objects: tuple[str, ...]
    M: dict[tuple[str, str], tuple[str, ...]]
    name: str = ""
    metadata: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_counts(
        cls,
        objects: Iterable[str],
        M: Mapping[tuple[str, str], int | Iterable[str]],
        name: str = "",
        metadata: Mapping[str, Any] | None = None,
    ) -> "DiscreteSystem":
        objs = tuple(objects)
        table: dict[tuple[str, str], tuple[str, ...]] = {}
        for (b, a), v in M.items():
            if b not in objs or a not in objs:
                raise PreconditionError(f"unknown object in sector entry {b}|{a}")
            if isinstance(v, int):
                names = tuple(f"{b}>{a}" if v == 1 else f"{b}>{a}#{i}" for i in range(v))
            else:
                names = tuple(v)
            if names:
                table[(b, a)] = names
        return cls(objs, table, name, dict(metadata or {}))

    def into(self, a: str) -> list[tuple[str, str]]:
        """(source, sector) pairs for sectors landing in ``a``."""
        return [(b, m) for (b, t), ms in sorted(self.M.items()) if t == a for m in ms]

    def count(self, b: str, a: str) -> int:
        return len(self.M.get((b, a), ()))

    def to_system(self) -> EquationalSystem:
        cat = FinCategory(self.objects, [], {})
        sectors = [(m, b, a) for (b, a), ms in sorted(self.M.items()) for m in ms]
        return EquationalSystem(cat, Module(cat, sectors, {}, {}), self.name, dict(self.metadata))

    def transfer_matrix(self) -> np.ndarray:
        idx = {a: i for i, a in enumerate(self.objects)}
        T = np.zeros((len(self.objects), len(self.objects)), dtype=object)
        T[:, :] = 0
        for (b, a), ms in self.M.items():
            T[idx[a], idx[b]] += len(ms)
        return T

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "objects": list(self.objects),
            "M": {f"{b}|{a}": list(ms) for (b, a), ms in sorted(self.M.items())},
        }


def from_system(S: EquationalSystem) -> DiscreteSystem:
    if not S.category.is_discrete():
        raise PreconditionError("system has non-identity arrows")
    table: dict[tuple[str, str], list[str]] = {}
    for m, (b, a) in sorted(S.module.sectors.items()):
        table.setdefault((b, a), []).append(m)
    return DiscreteSystem(
        S.category.objects, {k: tuple(v) for k, v in table.items()}, S.name, dict(S.metadata)
    )


def _as_discrete(D: DiscreteSystem | EquationalSystem) -> DiscreteSystem:
    return from_system(D) if isinstance(D, EquationalSystem) else D


def nonempty_objects(D: DiscreteSystem | EquationalSystem) -> set[str]:
    D = _as_discrete(D)
    live = set(D.objects)
    changed = True
    while changed:
        changed = False
        for a in sorted(live):
            if not any(b in live for b, _ in D.into(a)):
                live.discard(a)
                changed = True
    return live


def _live_sources(D: DiscreteSystem, live: set[str], a: str) -> list[tuple[str, str]]:
    return [(b, m) for b, m in D.into(a) if b in live]


def singleton_objects(D: DiscreteSystem | EquationalSystem) -> set[str]:
    D = _as_discrete(D)
    live = nonempty_objects(D)
    deterministic = {a for a in live if len(_live_sources(D, live, a)) == 1}
    out = set()
    for a in live:
        seen = {a}
        stack = [a]
        ok = True
        while stack and ok:
            here = stack.pop()
            if here not in deterministic:
                ok = False
                break
            for b, _ in _live_sources(D, live, here):
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
        if ok:
            out.add(a)
    return out


@dataclass(frozen=True)
class ObjectClass:
    tag: str
    witness: dict[str, Any] | None = None

    def to_json(self) -> dict:
        out: dict[str, Any] = {"class": self.tag}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _isolated_witness(D: DiscreteSystem, live: set[str], singles: set[str], a: str) -> dict:
    """A live sector path from ``a`` back to a singleton, then its forced tail."""
    prev: dict[str, tuple[str, str] | None] = {a: None}
    queue = [a]
    target = None
    while queue:
        here = queue.pop(0)
        if here in singles:
            target = here
            break
        for b, m in _live_sources(D, live, here):
            if b not in prev:
                prev[b] = (here, m)
                queue.append(b)
    assert target is not None
    path = []
    node = target
    while prev[node] is not None:
        parent, m = prev[node]
        path.append(m)
        node = parent
    path.reverse()
    cycle_seen: dict[str, int] = {}
    tail: list[str] = []
    node = target
    while node not in cycle_seen:
        cycle_seen[node] = len(tail)
        b, m = _live_sources(D, live, node)[0]
        tail.append(m)
        node = b
    start = cycle_seen[node]
    return {
        "singleton": target,
        "prefix": path + tail[:start],
        "cycle": tail[start:],
    }


def classify(D: DiscreteSystem | EquationalSystem) -> dict[str, ObjectClass]:
    """Empty, Singleton, Cantor or Mixed for each object.

    An object's space only depends on the objects reachable backwards along
    sectors, so a live object that cannot reach a singleton lies in a
    subsystem with no one-point spaces and is Cantor.
    """
    D = _as_discrete(D)
    live = nonempty_objects(D)
    singles = singleton_objects(D)
    out: dict[str, ObjectClass] = {}
    for a in D.objects:
        if a not in live:
            out[a] = ObjectClass("Empty")
        elif a in singles:
            out[a] = ObjectClass("Singleton")
        elif _reaches(D, live, singles, a):
            out[a] = ObjectClass("Mixed", _isolated_witness(D, live, singles, a))
        else:
            out[a] = ObjectClass("Cantor")
    return out


def _reaches(D: DiscreteSystem, live: set[str], singles: set[str], a: str) -> bool:
    seen = {a}
    stack = [a]
    while stack:
        here = stack.pop()
        if here in singles:
            return True
        for b, _ in _live_sources(D, live, here):
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return False


def stream_count(D: DiscreteSystem | EquationalSystem, a: str, n: int) -> int:
    """Number of length-n sector words ending at ``a``."""
    D = _as_discrete(D)
    if a not in D.objects:
        raise PreconditionError(f"unknown object {a!r}")
    idx = {x: i for i, x in enumerate(D.objects)}
    T = D.transfer_matrix()
    v = np.zeros(len(D.objects), dtype=object)
    v[:] = 0
    v[idx[a]] = 1
    for _ in range(n):
        v = v.dot(T)
    return int(sum(v))


def walks_counts(N: int, modified: bool = False) -> DiscreteSystem:
    """Walks on 0..N: each position n ≥ 1 steps to n−1 or n+1 (where present).

    Position 0 stays put, or with ``modified`` steps to 1.
    """
    objs = [str(i) for i in range(N + 1)]
    M: dict[tuple[str, str], int] = {}
    for a in range(N + 1):
        if a == 0:
            M[("1" if modified else "0", "0")] = 1
            continue
        M[(str(a - 1), str(a))] = 1
        if a + 1 <= N:
            M[(str(a + 1), str(a))] = 1
    rule = "modified" if modified else "original"
    return DiscreteSystem.from_counts(
        objs,
        M,
        f"walks({rule},{N})",
        {"truncation": {"kind": "positions", "N": N, "note": f"position {N} cannot step right"}},
    )
