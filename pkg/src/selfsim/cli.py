"""``selfsim`` command line.

Every verb prints one JSON document (keys sorted) unless ``--csv`` or
``--svg`` asks for a delimited or vector rendering.  Exit codes: 0 success,
Holds or Equal; 1 a definite negative; 2 inconclusive or Unknown; 3 bad
input; 4 resource cap hit.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from typing import Any, Callable, Sequence

from . import catalog, jsonio
from ._support import InputError, PreconditionError, ResourceCapExceeded, default_budget, jsonable
from .coalgebra import Coalgebra, check_reso_connected, resolutions, terminal_map
from .complexes import (
    ComplexSpace,
    LassoComplex,
    complex_id,
    decide_equal,
    enumerate_complexes,
    truncated_components,
    validate_lasso,
)
from .discrete import classify, from_system
from .finmod import EquationalSystem, check_module_nondegenerate, tensor, validate_system
from .fincat import check_functor_nondegenerate, validate_functor
from .recognition import (
    GeometricRealization,
    approximant_sets,
    check_realization,
    crude_verify,
    decay_figure,
    diameter_decay,
    full_cells,
    render,
    render_figure,
)
from .realize import (
    binary_refinement,
    build_system_from_covers,
    discrete_realizability,
    dyadic_covers,
    validate_cover_sequence,
    validate_inverse_sequence,
    verify_cover_fixed_point,
)
from .solvability import check_S

OK, NEGATIVE, INCONCLUSIVE, INPUT_ERROR, CAP = 0, 1, 2, 3, 4


class Outcome:
    """What a verb produced: a JSON payload or raw text, plus an exit code."""

    def __init__(self, payload: Any = None, code: int = OK, text: str | None = None) -> None:
        self.payload = payload
        self.code = code
        self.text = text


# ---- input helpers ----


def _system(args: argparse.Namespace) -> tuple[EquationalSystem, GeometricRealization | None]:
    S, R, _ = jsonio.load_system_source(args.input)
    return S, R


def _object(S: EquationalSystem, args: argparse.Namespace) -> str:
    a = args.at if args.at is not None else S.category.objects[-1]
    if a not in S.category.identity:
        raise InputError("", f"--at {a!r} is not an object of the system")
    return a


def _need_realization(R: GeometricRealization | None) -> GeometricRealization:
    if R is None:
        raise InputError("/realization", "this verb needs a geometric realization")
    return R


def _lasso(source: str) -> LassoComplex:
    if os.path.exists(source):
        return jsonio.load_lasso(jsonio.read_json(source))
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise InputError("", f"--lasso {source!r} is neither a file nor inline JSON") from exc
    return jsonio.load_lasso(doc)


def _lassos(S: EquationalSystem, args: argparse.Namespace, count: int) -> list[LassoComplex]:
    if len(args.lasso or []) != count:
        raise InputError("", f"expected {count} --lasso arguments")
    out = []
    for i, src in enumerate(args.lasso):
        L = _lasso(src)
        errs = validate_lasso(S.module, L)
        if errs:
            raise InputError(f"/lasso/{i}", errs[0])
        out.append(L)
    return out


_CALL = re.compile(r"\s*([a-z_]+)\s*(?:\((.*)\))?\s*")


def _coalgebra(args: argparse.Namespace) -> Coalgebra:
    """A coalgebra file (with ``--system`` or an embedded ``system``) or a catalog coalgebra call."""
    src = args.input
    if os.path.exists(src):
        doc = jsonio.read_json(src)
        if args.system is not None:
            S, _, _ = jsonio.load_system_source(args.system)
        elif isinstance(doc, dict) and "system" in doc:
            sys_doc = doc["system"]
            if isinstance(sys_doc, str):
                S = catalog.build(sys_doc).system
            else:
                S = jsonio.load_system(sys_doc, "/system")
        else:
            raise InputError("/system", "coalgebra input needs --system or an embedded system")
        return jsonio.load_coalgebra(S, doc)
    match = _CALL.fullmatch(src)
    if not match or match.group(1) not in catalog.COALGEBRAS:
        raise InputError("", f"{src!r} is neither a file nor a catalog coalgebra")
    params = [int(p) for p in re.split(r"\s*,\s*", match.group(2)) if p] if match.group(2) else []
    try:
        return catalog.coalgebra(match.group(1), *params)
    except TypeError as exc:
        raise InputError("", f"bad parameters for {match.group(1)}: {exc}") from exc


def _element(C: Coalgebra, args: argparse.Namespace) -> tuple[str, str]:
    a = _object(C.system, args)
    if args.element is None:
        raise InputError("", "--element is required")
    if args.element not in C.carrier(a):
        raise InputError("", f"{args.element!r} is not an element over {a!r}")
    return a, args.element


def _depth(args: argparse.Namespace, default: int) -> int:
    d = default if args.depth is None else args.depth
    if d < 0:
        raise InputError("", "--depth must be nonnegative")
    return d


# ---- verbs ----


def cmd_validate(args: argparse.Namespace) -> Outcome:
    S, R = _system(args)
    rep = validate_system(S)
    counts = {f"{b}|{a}": len(S.module.between(b, a)) for a in S.category.objects for b in S.category.objects}
    out: dict[str, Any] = {"system": rep.to_json(), "sector_counts": counts}
    ok = rep.ok
    if R is not None:
        rrep = check_realization(S, R)
        out["realization"] = rrep.to_json()
        ok = ok and rrep.ok
    return Outcome(out, OK if ok else NEGATIVE)


def cmd_nd_check(args: argparse.Namespace) -> Outcome:
    S, _ = _system(args)
    if args.functor:
        X = jsonio.load_functor(S.category, jsonio.read_json(args.functor))
        vrep = validate_functor(X)
        if not vrep.ok:
            raise InputError("/on_arrows", f"not a functor: {vrep.first().kind}")  # type: ignore[union-attr]
        rep = check_functor_nondegenerate(X)
    else:
        rep = check_module_nondegenerate(S.module)
    return Outcome(rep.to_json(), OK if rep.ok else NEGATIVE)


def cmd_tensor(args: argparse.Namespace) -> Outcome:
    S, _ = _system(args)
    if not args.functor:
        raise InputError("", "--functor is required")
    X = jsonio.load_functor(S.category, jsonio.read_json(args.functor))
    vrep = validate_functor(X)
    if not vrep.ok:
        raise InputError("/on_arrows", f"not a functor: {vrep.first().kind}")  # type: ignore[union-attr]
    T = tensor(S.module, X)
    return Outcome({"sizes": T.sizes(), "classes": T.to_json(), "functor": T.as_functor().to_json()})


def cmd_complexes(args: argparse.Namespace) -> Outcome:
    S, _ = _system(args)
    a, n = _object(S, args), _depth(args, 3)
    cs = enumerate_complexes(S.module, a, n, args.budget)
    if args.csv:
        return Outcome(text="complex\n" + "".join(complex_id(c) + "\n" for c in cs))
    return Outcome({"object": a, "depth": n, "count": len(cs), "complexes": [list(c) for c in cs]})


def cmd_components(args: argparse.Namespace) -> Outcome:
    S, _ = _system(args)
    a, n = _object(S, args), _depth(args, 3)
    tc = truncated_components(S, a, n, args.budget)
    if args.csv:
        lines = ["depth,count"] + [f"{r},{tc.count(r)}" for r in range(n + 1)]
        return Outcome(text="\n".join(lines) + "\n")
    return Outcome({"object": a, **tc.to_json()})


def cmd_distance(args: argparse.Namespace) -> Outcome:
    S, _ = _system(args)
    a, n = _object(S, args), _depth(args, 6)
    L, L2 = _lassos(S, args, 2)
    profile: list[Any] = []
    for r in range(1, n + 1):
        d = ComplexSpace.build(S, a, r, args.budget).distance(L.unroll(r), L2.unroll(r))
        profile.append("inf" if d == float("inf") else d)
    if args.csv:
        return Outcome(text="depth,distance\n" + "".join(f"{r},{d}\n" for r, d in enumerate(profile, 1)))
    return Outcome({"object": a, "profile": profile})


def cmd_equal(args: argparse.Namespace) -> Outcome:
    S, _ = _system(args)
    a, n = _object(S, args), _depth(args, 10)
    L, L2 = _lassos(S, args, 2)
    v = decide_equal(S, a, L, L2, n, bound=args.bound, budget=args.budget)
    code = {"Equal": OK, "DistinctAtDepth": NEGATIVE}.get(v.tag, INCONCLUSIVE)
    return Outcome(v.to_json(), code)


def cmd_solvable(args: argparse.Namespace) -> Outcome:
    S, _ = _system(args)
    v = check_S(S)
    return Outcome(v.to_json(), {"Holds": OK, "Fails": NEGATIVE}.get(v.tag, INCONCLUSIVE))


def cmd_resolve(args: argparse.Namespace) -> Outcome:
    C = _coalgebra(args)
    a, x = _element(C, args)
    n = _depth(args, 3)
    rep = check_reso_connected(C, a, x, n, args.budget)
    resos = resolutions(C, a, x, n, args.budget)
    out = {"object": a, "element": x, "depth": n, "check": rep.to_json(), "resolutions": [r.to_json() for r in resos]}
    return Outcome(out, OK if rep.ok else NEGATIVE)


def cmd_terminal_map(args: argparse.Namespace) -> Outcome:
    C = _coalgebra(args)
    a, x = _element(C, args)
    img = terminal_map(C, a, x, _depth(args, 4), budget=args.budget)
    return Outcome({"object": a, "element": x, **img.to_json()})


def cmd_classify(args: argparse.Namespace) -> Outcome:
    if os.path.exists(args.input):
        doc = jsonio.read_json(args.input)
        D = jsonio.load_discrete(doc) if jsonio.is_discrete_doc(doc) else from_system(jsonio.load_system(doc))
    else:
        entry = catalog.build(args.input) if _catalog_name(args.input) else None
        if entry is None:
            raise InputError("", f"{args.input!r} is neither a file nor a catalog entry")
        D = entry.discrete or from_system(entry.system)
    return Outcome({a: c.to_json() for a, c in classify(D).items()})


def _catalog_name(name: str) -> bool:
    m = _CALL.fullmatch(name)
    return bool(m) and m.group(1) in catalog.BUILDERS


def cmd_recognize(args: argparse.Namespace) -> Outcome:
    S, R = _system(args)
    R = _need_realization(R)
    depth = _depth(args, 3)
    result = crude_verify(S, R, depth=depth, eps=args.tol, budget=args.budget)
    out: dict[str, Any] = {"crude": result.to_json()}
    if args.coalgebra:
        ns = argparse.Namespace(**{**vars(args), "input": args.coalgebra, "system": args.input})
        C = _coalgebra(ns)
        a, x = _element(C, args)
        out["approximants"] = approximant_sets(S, R, C, a, x, depth).to_json()
    if args.figure:
        a = _object(S, args)
        out["figure"] = render_figure(S, R, a, depth, args.figure, args.budget)
    if result.ok:
        return Outcome(out, OK)
    invalid = getattr(result, "reason", "") == "realization invalid"
    return Outcome(out, NEGATIVE if invalid else INCONCLUSIVE)


def cmd_decay(args: argparse.Namespace) -> Outcome:
    S, R = _system(args)
    R = _need_realization(R)
    a, n = _object(S, args), _depth(args, 6)
    result = diameter_decay(S, R, a, n, args.budget)
    out: dict[str, Any] = result.to_json()
    if args.figure:
        out["figure"] = decay_figure(result, args.figure, args.ratio)
    if args.csv:
        rows = "".join(f"{r},{d!r}\n" for r, d in enumerate(result.sup))
        return Outcome(text="depth,diameter\n" + rows)
    return Outcome(out)


def cmd_render(args: argparse.Namespace) -> Outcome:
    S, R = _system(args)
    R = _need_realization(R)
    a, n = _object(S, args), _depth(args, 3)
    fmt = "svg" if args.svg else "csv" if args.csv else args.format
    if args.figure:
        render_figure(S, R, a, n, args.figure, args.budget)
    if fmt in ("csv", "svg"):
        return Outcome(text=render(S, R, a, n, fmt, args.budget))
    cells = full_cells(S, R, a, n, args.budget)
    out: dict[str, Any] = {"object": a, "depth": n, "count": len(cells), "cells": [c.to_json() for c in cells]}
    if args.figure:
        out["figure"] = args.figure
    return Outcome(out)


def _realize_source(src: str) -> tuple[str, Any]:
    if os.path.exists(src):
        doc = jsonio.read_json(src)
        if isinstance(doc, dict) and "levels" in doc:
            return "covers", jsonio.load_covers(doc)
        if isinstance(doc, dict) and "sets" in doc:
            return "inverse", jsonio.load_inverse_sequence(doc)
        raise InputError("", "expected a cover sequence (points, levels) or an inverse sequence (sets, maps)")
    m = _CALL.fullmatch(src)
    params = [int(p) for p in (m.group(2) or "").split(",") if p.strip()] if m else []
    if m and m.group(1) == "dyadic":
        return "covers", dyadic_covers(*params)
    if m and m.group(1) == "binary":
        return "inverse", binary_refinement(*(params or [4]))
    raise InputError("", f"{src!r} is neither a file nor one of dyadic(...), binary(...)")


def cmd_realize(args: argparse.Namespace) -> Outcome:
    kind, obj = _realize_source(args.input)
    if kind == "inverse":
        rep = validate_inverse_sequence(obj)
        if not rep.ok:
            return Outcome({"sequence": rep.to_json()}, NEGATIVE)
        real = discrete_realizability(obj)
        return Outcome(real.to_json(), OK if real.report.ok else NEGATIVE)
    rep = validate_cover_sequence(obj)
    out: dict[str, Any] = {"covers": rep.to_json()}
    if not rep.ok:
        return Outcome(out, NEGATIVE)
    built = build_system_from_covers(obj)
    srep = validate_system(built.system)
    fixed = verify_cover_fixed_point(obj, built)
    out.update({"system": built.system.to_json(), "system_check": srep.to_json(), "fixed_point": fixed.to_json()})
    return Outcome(out, OK if srep.ok and fixed.ok else NEGATIVE)


def cmd_examples(args: argparse.Namespace) -> Outcome:
    if args.input == "list":
        rows = []
        for name in catalog.names():
            e = catalog.build(name)
            rows.append({"name": name, "objects": list(e.system.category.objects), "realized": e.realization is not None})
        return Outcome({"examples": rows, "coalgebras": sorted(catalog.COALGEBRAS)})
    if args.input == "dump":
        if not args.name:
            raise InputError("", "examples dump needs a name")
        if not _catalog_name(args.name):
            raise InputError("", f"unknown catalog entry {args.name!r}")
        return Outcome(catalog.build(args.name).to_json())
    raise InputError("", "examples takes 'list' or 'dump NAME'")


VERBS: dict[str, Callable[[argparse.Namespace], Outcome]] = {
    "validate": cmd_validate,
    "nd-check": cmd_nd_check,
    "tensor": cmd_tensor,
    "complexes": cmd_complexes,
    "components": cmd_components,
    "distance": cmd_distance,
    "equal": cmd_equal,
    "solvable": cmd_solvable,
    "resolve": cmd_resolve,
    "terminal-map": cmd_terminal_map,
    "classify": cmd_classify,
    "recognize": cmd_recognize,
    "decay": cmd_decay,
    "render": cmd_render,
    "realize": cmd_realize,
    "examples": cmd_examples,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="selfsim", description="Finite equational systems and their universal solutions.")
    p.add_argument("verb", choices=sorted(VERBS))
    p.add_argument("input", help="JSON file or catalog name (for 'examples': list or dump)")
    p.add_argument("name", nargs="?", help="catalog name for 'examples dump'")
    p.add_argument("--depth", type=int)
    p.add_argument("--budget", type=int, default=None, help="resource cap (default: $SELFSIM_BUDGET or 1e6)")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--format", choices=("json", "csv", "svg"), default="json")
    p.add_argument("--csv", action="store_true")
    p.add_argument("--svg", action="store_true")
    p.add_argument("--at", help="base object (default: the last declared object)")
    p.add_argument("--lasso", action="append", help="lasso file or inline JSON; give twice")
    p.add_argument("--element")
    p.add_argument("--functor", help="set functor JSON")
    p.add_argument("--system", help="system for a coalgebra file")
    p.add_argument("--coalgebra", help="coalgebra for approximant sets")
    p.add_argument("--bound", type=int, default=5, help="distance bound reported by 'equal'")
    p.add_argument("--ratio", type=float, help="reference decay ratio drawn in the decay figure")
    p.add_argument("--figure", help="write a PNG figure to this path")
    p.add_argument("--out", help="write the output here instead of stdout")
    p.add_argument("--seed", type=int, default=0, help="accepted for harness use; decision verbs ignore it")
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else INPUT_ERROR
    if args.budget is None:
        args.budget = default_budget()
    elif args.budget <= 0:
        _emit(jsonio.dumps({"error": "input", "pointer": "/", "message": "--budget must be positive"}), None)
        return INPUT_ERROR
    if args.csv:
        args.format = "csv"
    if args.svg:
        args.format = "svg"
    try:
        outcome = VERBS[args.verb](args)
    except InputError as exc:
        _emit(jsonio.dumps({"error": "input", "pointer": exc.pointer, "message": exc.message}), None)
        return INPUT_ERROR
    except PreconditionError as exc:
        _emit(jsonio.dumps({"error": "precondition", "message": str(exc)}), None)
        return INPUT_ERROR
    except ResourceCapExceeded as exc:
        _emit(jsonio.dumps({"error": "resource cap", "what": exc.what, "cap": exc.cap}), None)
        return CAP
    text = outcome.text if outcome.text is not None else jsonio.dumps(jsonable(outcome.payload))
    _emit(text, args.out)
    return outcome.code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
