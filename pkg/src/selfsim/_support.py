"""Shared plumbing: reports, union-find, errors, budget handling."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable

DEFAULT_BUDGET = 10**6


class InputError(ValueError):
    """Malformed user input; ``pointer`` is a JSON-pointer style path."""

    def __init__(self, pointer: str, message: str) -> None:
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer or "/"
        self.message = message


class ResourceCapExceeded(RuntimeError):
    def __init__(self, what: str, cap: int) -> None:
        super().__init__(f"{what} exceeded resource cap of {cap}")
        self.what = what
        self.cap = cap


class PreconditionError(ValueError):
    pass


def default_budget() -> int:
    raw = os.environ.get("SELFSIM_BUDGET")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            return DEFAULT_BUDGET
        if value > 0:
            return value
    return DEFAULT_BUDGET


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, **{k: _jsonable(v) for k, v in self.detail.items()}}


@dataclass(frozen=True)
class Report:
    violations: tuple[Violation, ...] = ()
    info: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def first(self) -> Violation | None:
        return self.violations[0] if self.violations else None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"ok": self.ok, "violations": [v.to_json() for v in self.violations]}
        if self.info:
            out["info"] = _jsonable(self.info)
        return out

    def __bool__(self) -> bool:
        return self.ok


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted((_jsonable(v) for v in value), key=str)
    if hasattr(value, "to_json"):
        return value.to_json()
    if isinstance(value, float) and value == float("inf"):
        return "inf"
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


jsonable = _jsonable


class UnionFind:
    """Disjoint sets with path compression; each root tracks its least member."""

    def __init__(self, items: Iterable[Hashable] = ()) -> None:
        self._parent: dict[Hashable, Hashable] = {}
        self._least: dict[Hashable, Hashable] = {}
        for item in items:
            self.add(item)

    def add(self, item: Hashable) -> None:
        if item not in self._parent:
            self._parent[item] = item
            self._least[item] = item

    def __contains__(self, item: Hashable) -> bool:
        return item in self._parent

    def find(self, item: Hashable) -> Hashable:
        root = item
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[item] != root:
            self._parent[item], item = root, self._parent[item]
        return root

    def union(self, a: Hashable, b: Hashable) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self._parent[rb] = ra
        if self._least[rb] < self._least[ra]:
            self._least[ra] = self._least[rb]
        return True

    def canonical(self, item: Hashable) -> Hashable:
        return self._least[self.find(item)]

    def classes(self) -> list[list[Hashable]]:
        groups: dict[Hashable, list[Hashable]] = {}
        for item in self._parent:
            groups.setdefault(self.find(item), []).append(item)
        return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])


def tuple_id(parts: Iterable[str]) -> str:
    return "(" + ",".join(parts) + ")"
