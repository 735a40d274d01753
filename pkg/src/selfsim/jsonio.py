"""Reading the JSON formats, with errors that point at the offending field."""

from __future__ import annotations

import json
import os
from fractions import Fraction
from typing import Any, Iterable, Mapping

from ._geometry import AffineMap
from ._support import InputError, PreconditionError
from .coalgebra import Coalgebra
from .complexes import LassoComplex
from .discrete import DiscreteSystem
from .fincat import CategoryError, FinCategory, SetFunctor
from .finmod import EquationalSystem, Module
from .realize import CoverSequence, InverseSequence
from .recognition import Domain, GeometricRealization, ParametricMap


def read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise InputError("", f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError("", f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _get(doc: Any, key: str, ptr: str, kind: type | tuple[type, ...] | None = None) -> Any:
    if not isinstance(doc, dict):
        raise InputError(ptr, "expected an object")
    if key not in doc:
        raise InputError(f"{ptr}/{key}", "missing field")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        names = kind.__name__ if isinstance(kind, type) else " or ".join(k.__name__ for k in kind)
        raise InputError(f"{ptr}/{key}", f"expected {names}")
    return value


def _str_list(value: Any, ptr: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise InputError(ptr, "expected a list of strings")
    return list(value)


def split_key(key: str, left: Iterable[str], right: Iterable[str], ptr: str) -> tuple[str, str]:
    """Split ``"x|y"`` where either id may itself contain ``|``."""
    lset, rset = set(left), set(right)
    hits = [
        (key[:i], key[i + 1 :])
        for i, ch in enumerate(key)
        if ch == "|" and key[:i] in lset and key[i + 1 :] in rset
    ]
    if len(hits) != 1:
        raise InputError(ptr, f"cannot read {key!r} as a pair of known ids")
    return hits[0]


def load_category(doc: Any, ptr: str = "") -> FinCategory:
    objects = _str_list(_get(doc, "objects", ptr), f"{ptr}/objects")
    raw = _get(doc, "arrows", ptr, list) if "arrows" in doc else []
    arrows = []
    for i, a in enumerate(raw):
        p = f"{ptr}/arrows/{i}"
        arrows.append((_get(a, "id", p, str), _get(a, "src", p, str), _get(a, "tgt", p, str)))
    ids = [a[0] for a in arrows] + [f"id_{o}" for o in objects]
    compose = {}
    for key, h in (doc.get("compose") or {}).items():
        p = f"{ptr}/compose/{key}"
        if not isinstance(h, str):
            raise InputError(p, "expected an arrow id")
        compose[split_key(key, ids, ids, p)] = h
    try:
        return FinCategory(objects, arrows, compose)
    except CategoryError as exc:
        raise InputError(f"{ptr}/arrows", str(exc)) from exc


def load_module(cat: FinCategory, doc: Any, ptr: str = "") -> Module:
    raw = _get(doc, "sectors", ptr, list)
    sectors = []
    for i, s in enumerate(raw):
        p = f"{ptr}/sectors/{i}"
        ident, src, tgt = _get(s, "id", p, str), _get(s, "src", p, str), _get(s, "tgt", p, str)
        for field_, obj in (("src", src), ("tgt", tgt)):
            if obj not in cat.identity:
                raise InputError(f"{p}/{field_}", f"unknown object {obj!r}")
        sectors.append((ident, src, tgt))
    sids = [s[0] for s in sectors]
    left = {}
    for key, v in (doc.get("left") or {}).items():
        p = f"{ptr}/left/{key}"
        left[split_key(key, cat.arrows, sids, p)] = _sector_value(v, sids, p)
    right = {}
    for key, v in (doc.get("right") or {}).items():
        p = f"{ptr}/right/{key}"
        right[split_key(key, sids, cat.arrows, p)] = _sector_value(v, sids, p)
    try:
        return Module(cat, sectors, left, right)
    except ValueError as exc:
        raise InputError(f"{ptr}/sectors", str(exc)) from exc


def _sector_value(v: Any, sids: list[str], ptr: str) -> str:
    if not isinstance(v, str) or v not in sids:
        raise InputError(ptr, f"unknown sector {v!r}")
    return v


def load_system(doc: Any, ptr: str = "") -> EquationalSystem:
    cat = load_category(_get(doc, "category", ptr, dict), f"{ptr}/category")
    module = load_module(cat, _get(doc, "module", ptr, dict), f"{ptr}/module")
    meta = doc.get("metadata") or {}
    if not isinstance(meta, dict):
        raise InputError(f"{ptr}/metadata", "expected an object")
    return EquationalSystem(cat, module, str(doc.get("name", "")), dict(meta))


def load_functor(cat: FinCategory, doc: Any, ptr: str = "") -> SetFunctor:
    on_objects_raw = _get(doc, "on_objects", ptr, dict)
    on_objects = {}
    for a, xs in on_objects_raw.items():
        if a not in cat.identity:
            raise InputError(f"{ptr}/on_objects/{a}", "unknown object")
        on_objects[a] = _str_list(xs, f"{ptr}/on_objects/{a}")
    elems = {x for xs in on_objects.values() for x in xs}
    on_arrows = {}
    for key, y in (doc.get("on_arrows") or {}).items():
        p = f"{ptr}/on_arrows/{key}"
        if not isinstance(y, str):
            raise InputError(p, "expected an element id")
        on_arrows[split_key(key, cat.arrows, elems, p)] = y
    return SetFunctor(cat, on_objects, on_arrows)


def load_coalgebra(S: EquationalSystem, doc: Any, ptr: str = "") -> Coalgebra:
    carrier_doc = doc.get("carrier", doc) if isinstance(doc, dict) else doc
    cptr = f"{ptr}/carrier" if isinstance(doc, dict) and "carrier" in doc else ptr
    X = load_functor(S.category, carrier_doc, cptr)
    elems = {x for a in S.category.objects for x in X(a)}
    xi = {}
    for key, v in _get(doc, "xi", ptr, dict).items():
        p = f"{ptr}/xi/{key}"
        a, x = split_key(key, S.category.objects, elems, p)
        if not (isinstance(v, list) and len(v) == 2 and all(isinstance(t, str) for t in v)):
            raise InputError(p, "expected [sector, element]")
        xi[(a, x)] = (v[0], v[1])
    boundary = frozenset(tuple(b) for b in doc.get("boundary", []))
    return Coalgebra(S, X, xi, boundary, str(doc.get("name", "")))  # type: ignore[arg-type]


def load_lasso(doc: Any, ptr: str = "") -> LassoComplex:
    base = _get(doc, "base_object", ptr, str)
    prefix = _str_list(doc.get("prefix", []), f"{ptr}/prefix")
    cycle = _str_list(_get(doc, "cycle", ptr), f"{ptr}/cycle")
    try:
        return LassoComplex(base, tuple(prefix), tuple(cycle))
    except (ValueError, PreconditionError) as exc:
        raise InputError(f"{ptr}/cycle", str(exc)) from exc


def load_discrete(doc: Any, ptr: str = "") -> DiscreteSystem:
    objects = _str_list(_get(doc, "objects", ptr), f"{ptr}/objects")
    table: dict[tuple[str, str], Any] = {}
    for key, v in _get(doc, "M", ptr, dict).items():
        p = f"{ptr}/M/{key}"
        b, a = split_key(key, objects, objects, p)
        if isinstance(v, bool) or not (isinstance(v, int) and v >= 0 or isinstance(v, list)):
            raise InputError(p, "expected a count or a list of sector ids")
        table[(b, a)] = v if isinstance(v, int) else _str_list(v, p)
    return DiscreteSystem.from_counts(objects, table, str(doc.get("name", "")))


def _number(v: Any, rational: bool, ptr: str) -> Fraction | float:
    try:
        if rational:
            if isinstance(v, float):
                return Fraction(v).limit_denominator(10**12)
            return Fraction(v)
        return float(Fraction(v)) if isinstance(v, str) else float(v)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(ptr, f"not a number: {v!r}") from exc


def _vector(v: Any, rational: bool, ptr: str) -> tuple:
    if not isinstance(v, list):
        raise InputError(ptr, "expected a list of numbers")
    return tuple(_number(x, rational, f"{ptr}/{i}") for i, x in enumerate(v))


def _affine(doc: Any, rational: bool, ptr: str) -> AffineMap:
    A = _get(doc, "A", ptr, list)
    b = _vector(_get(doc, "b", ptr, list), rational, f"{ptr}/b")
    rows = [_vector(r, rational, f"{ptr}/A/{i}") for i, r in enumerate(A)]
    if len(rows) == 1 and not rows[0] and not b:
        rows = []
    if len(rows) != len(b):
        if all(not r for r in rows) and len(rows) <= 1:
            rows = [()] * len(b)
        else:
            raise InputError(f"{ptr}/A", "row count differs from offset length")
    return AffineMap(rows, b)


def load_realization(doc: Any, ptr: str = "") -> GeometricRealization:
    mode = doc.get("mode", "rational")
    if mode not in ("rational", "float"):
        raise InputError(f"{ptr}/mode", "expected 'rational' or 'float'")
    rational = mode == "rational"
    domains = {}
    for a, d in _get(doc, "domains", ptr, dict).items():
        p = f"{ptr}/domains/{a}"
        verts = tuple(_vector(v, rational, f"{p}/vertices/{i}") for i, v in enumerate(_get(d, "vertices", p, list)))
        dim = d.get("dim", len(verts[0]) if verts else 0)
        if any(len(v) != dim for v in verts):
            raise InputError(f"{p}/vertices", f"vertices must have {dim} coordinates")
        samples = tuple(_vector(v, rational, f"{p}/samples/{i}") for i, v in enumerate(d.get("samples", [])))
        domains[a] = Domain(verts, bool(d.get("fills", True)), samples)
    maps: dict[str, Any] = {}
    for m, d in _get(doc, "sector_maps", ptr, dict).items():
        p = f"{ptr}/sector_maps/{m}"
        if isinstance(d, dict) and "kind" in d:
            try:
                maps[m] = ParametricMap(
                    d["kind"], dict(d.get("params", {})), float(d["lipschitz"]), int(d["source_dim"]), int(d["target_dim"])
                )
            except (KeyError, PreconditionError, TypeError, ValueError) as exc:
                raise InputError(p, f"bad parametric map: {exc}") from exc
        else:
            maps[m] = _affine(d, rational, p)
    arrows = {f: _affine(d, rational, f"{ptr}/arrow_maps/{f}") for f, d in (doc.get("arrow_maps") or {}).items()}
    tol = float(doc.get("tol", 1e-9))
    return GeometricRealization(domains, maps, arrows, mode, tol)


def load_covers(doc: Any, ptr: str = "") -> CoverSequence:
    points = _str_list(_get(doc, "points", ptr), f"{ptr}/points")
    levels = []
    for n, fam in enumerate(_get(doc, "levels", ptr, list)):
        if not isinstance(fam, list):
            raise InputError(f"{ptr}/levels/{n}", "expected a list of sets")
        levels.append([_str_list(V, f"{ptr}/levels/{n}/{i}") for i, V in enumerate(fam)])
    return CoverSequence.from_lists(points, levels)


def load_inverse_sequence(doc: Any, ptr: str = "") -> InverseSequence:
    sets = [_str_list(s, f"{ptr}/sets/{i}") for i, s in enumerate(_get(doc, "sets", ptr, list))]
    maps = []
    for i, m in enumerate(_get(doc, "maps", ptr, list)):
        if not isinstance(m, dict):
            raise InputError(f"{ptr}/maps/{i}", "expected an object")
        maps.append({str(k): str(v) for k, v in m.items()})
    return InverseSequence.from_lists(sets, maps)


def is_discrete_doc(doc: Any) -> bool:
    return isinstance(doc, dict) and "M" in doc and "category" not in doc


def load_system_source(source: str) -> tuple[EquationalSystem, GeometricRealization | None, dict]:
    """A JSON file or, failing that, a catalog name like ``freyd(2)``."""
    from . import catalog

    if os.path.exists(source):
        doc = read_json(source)
        if is_discrete_doc(doc):
            return load_discrete(doc).to_system(), None, doc
        S = load_system(doc)
        R = load_realization(doc["realization"], "/realization") if "realization" in doc else None
        return S, R, doc
    try:
        entry = catalog.build(source)
    except PreconditionError as exc:
        raise InputError("", f"{source!r} is neither a file nor a catalog entry ({exc})") from exc
    return entry.system, entry.realization, entry.to_json()


def dumps(value: Any) -> str:
    from ._support import jsonable

    return json.dumps(jsonable(value), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


__all__ = [
    "read_json",
    "load_category",
    "load_module",
    "load_system",
    "load_functor",
    "load_coalgebra",
    "load_lasso",
    "load_discrete",
    "load_realization",
    "load_covers",
    "load_inverse_sequence",
    "load_system_source",
    "dumps",
    "split_key",
]
