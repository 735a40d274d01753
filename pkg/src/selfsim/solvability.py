"""Deciding the solvability condition by a greatest-fixpoint survivor analysis.

A pair of arrows ending at a common object survives when it sits at the right
end of an infinite ladder diagram.  Because every set involved is finite, a
configuration with arbitrarily long ladders has an infinite one, so the
survivors are the greatest fixpoint of the one-step extension operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Any, Literal

from .complexes import factorizations
from .finmod import EquationalSystem

Kind = Literal["cospan", "parallel"]


@dataclass(frozen=True, order=True)
class EndPairConfig:
    kind: str
    left: str
    right: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "arrows": [self.left, self.right]}


def _configs(S: EquationalSystem, kind: Kind) -> list[EndPairConfig]:
    cat = S.category
    out = []
    for f, f2 in product(sorted(cat.arrows), repeat=2):
        if cat.tgt(f) != cat.tgt(f2):
            continue
        if kind == "parallel" and cat.src(f) != cat.src(f2):
            continue
        out.append(EndPairConfig(kind, f, f2))
    return out


def _extensions(S: EquationalSystem, fac, c: EndPairConfig) -> set[EndPairConfig]:
    M = S.module
    cat = S.category
    a, a2 = cat.src(c.left), cat.src(c.right)
    out: set[EndPairConfig] = set()
    firsts = M.into(a)
    for m in firsts:
        by_p: dict[str, list[str]] = {}
        for f1, p in fac[M.left[(c.left, m)]]:
            by_p.setdefault(p, []).append(f1)
        seconds = (m,) if c.kind == "parallel" else M.into(a2)
        for m2 in seconds:
            for f2, p in fac[M.left[(c.right, m2)]]:
                for f1 in by_p.get(p, ()):
                    out.add(EndPairConfig(c.kind, f1, f2))
    return out


def survivors(S: EquationalSystem, kind: Kind) -> set[EndPairConfig]:
    fac = factorizations(S.module)
    configs = _configs(S, kind)
    succ = {c: _extensions(S, fac, c) for c in configs}
    alive = set(configs)
    changed = True
    while changed:
        changed = False
        for c in sorted(alive):
            if not (succ[c] & alive):
                alive.discard(c)
                changed = True
    return alive


def extension_step(S: EquationalSystem, configs: set[EndPairConfig]) -> set[EndPairConfig]:
    """Configurations with at least one one-step extension landing in ``configs``."""
    fac = factorizations(S.module)
    return {c for c in configs if _extensions(S, fac, c) & configs}


def completes(S: EquationalSystem, c: EndPairConfig) -> bool:
    cat = S.category
    f, f2 = c.left, c.right
    if c.kind == "cospan":
        return any(
            cat.compose(f, g) == cat.compose(f2, g2)
            for g in cat.arrows_into(cat.src(f))
            for g2 in cat.arrows_into(cat.src(f2))
            if cat.src(g) == cat.src(g2)
        )
    return any(cat.compose(f, g) == cat.compose(f2, g) for g in cat.arrows_into(cat.src(f)))


@dataclass(frozen=True)
class SolvabilityVerdict:
    tag: str
    witness: EndPairConfig | None = None
    evidence: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        out: dict[str, Any] = {"verdict": self.tag}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if self.evidence:
            out["evidence"] = self.evidence
        return out


def _raw_check(S: EquationalSystem) -> SolvabilityVerdict:
    counts = {}
    for kind in ("cospan", "parallel"):
        alive = survivors(S, kind)
        counts[kind] = len(alive)
        for c in sorted(alive):
            if not completes(S, c):
                return SolvabilityVerdict("Fails", c, {"survivors": counts})
    return SolvabilityVerdict("Holds", None, {"survivors": counts})


def check_S(S: EquationalSystem, *, respect_truncation: bool = True) -> SolvabilityVerdict:
    """Holds, Fails with the first uncompleted survivor, or Unknown on truncated surrogates."""
    raw = _raw_check(S)
    if respect_truncation and S.truncated:
        evidence = dict(raw.evidence)
        evidence["truncation"] = S.metadata.get("truncation")
        evidence["truncated_result"] = raw.tag
        return SolvabilityVerdict("Unknown", raw.witness, evidence)
    return raw
