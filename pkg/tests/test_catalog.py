from __future__ import annotations

import math
from fractions import Fraction

import pytest

from selfsim import catalog
from selfsim._support import PreconditionError
from selfsim.complexes import truncated_components
from selfsim.discrete import classify, stream_count
from selfsim.fincat import decompose_into_representables
from selfsim.finmod import check_module_nondegenerate, validate_system
from selfsim.recognition import crude_verify, diameter_decay, full_cells
from selfsim.solvability import check_S

EXTRA = ["freyd(3)", "cantor(4)", "sierpinski(3)", "barycentric(1)", "edgewise(3)"]


def counts_key(S):
    return {f"{b}|{a}": len(S.module.between(b, a)) for b in S.category.objects for a in S.category.objects}


def ratio(text) -> float:
    return float(Fraction(text)) if isinstance(text, str) else float(text)


def check_expectation(entry, key, value):
    """Recompute one expected value along a route independent of how the entry was built."""
    S = entry.system
    R = entry.realization
    if key == "classification":
        return {a: c.tag for a, c in classify(entry.discrete).items()} == value
    if key == "component_counts":
        return all(truncated_components(S, "*", n).count() == v for n, v in value.items() if n <= 6)
    if key == "component_counts_at_1":
        tc = truncated_components(S, "1", max(value))
        return all(tc.count(n) == v for n, v in value.items())
    if key == "stream_counts":
        a = S.category.objects[0]
        return all(stream_count(S, a, n) == v for n, v in value.items())
    if key == "lambda":
        cert = crude_verify(S, R)
        return cert.ok and math.isclose(cert.factor, ratio(value), rel_tol=1e-9)
    if key == "sector_counts":
        return {k: v for k, v in counts_key(S).items() if k in value} == value
    if key == "sector_counts_into_2":
        return {b: len(S.module.between(b, "2")) for b in value} == value
    if key == "solvable":
        return check_S(S).tag == value
    if key == "decomposition":
        return all(decompose_into_representables(S.module.column(b)).multiplicity == v for b, v in value.items())
    if key == "sectors_into_1_from_1":
        return len(S.module.between("1", "1")) == value
    if key == "full_cells":
        return all(len(full_cells(S, R, "1", n)) == v for n, v in value.items() if n <= 4)
    if key == "top_sectors":
        return {a: len(S.module.between(a, a)) for a in value} == value
    a = S.category.objects[-1]
    if key == "decay_ratio":
        sup = diameter_decay(S, R, a, 5).sup
        return all(sup[n] <= sup[0] * ratio(value) ** n + 1e-12 for n in range(6))
    if key == "top_cell_diameter_ratio":
        sup = diameter_decay(S, R, a, 4).sup
        return all(math.isclose(sup[n + 1], sup[n] * ratio(value)) for n in range(4))
    if key == "decay_ratio_after_first_step":
        sup = diameter_decay(S, R, a, 4).sup
        return all(math.isclose(sup[n + 1], sup[n] * ratio(value)) for n in range(1, 4))
    raise AssertionError(f"no check for {key}")


@pytest.mark.parametrize("name", catalog.names() + EXTRA)
def test_entry_is_well_formed(name):
    e = catalog.build(name)
    assert validate_system(e.system).ok
    assert check_module_nondegenerate(e.system.module).ok
    expected_tag = "Unknown" if e.system.metadata.get("truncation") else "Holds"
    assert check_S(e.system).tag == expected_tag


@pytest.mark.parametrize("name", catalog.names() + EXTRA)
def test_expected_values(name):
    e = catalog.build(name)
    for key, exp in e.expected.items():
        assert exp.basis in ("stated", "derived", "constructed")
        assert check_expectation(e, key, exp.value), key


def test_julia_counts():
    S = catalog.build("julia").system
    assert [len(S.module.between(b, "2")) for b in "0123"] == [8, 0, 2, 1]
    assert S.metadata["status"].startswith("conjectural")


def test_barycentric_and_edgewise_top_counts():
    assert len(catalog.build("barycentric(2)").system.module.between("[2]", "[2]")) == 6
    assert len(catalog.build("edgewise(3)").system.module.between("[3]", "[3]")) == 8


def test_build_parses_names_and_rejects_bad_input():
    assert catalog.build("product(cantor(2),cantor(3))").system.module.counts() == {("(*,*)", "(*,*)"): 6}
    assert catalog.build("freyd", {"k": 3}).params == {"k": 3}
    for bad in ("freyd(1)", "nosuch", "walks(sideways,4)", "cantor(2"):
        with pytest.raises(PreconditionError):
            catalog.build(bad)


def test_to_json_round_trips_names():
    for name in catalog.names():
        doc = catalog.build(name).to_json()
        assert set(doc) >= {"name", "category", "module"}


def test_coalgebra_lookup():
    assert catalog.coalgebra("freyd_nondyadic", 5).carrier.size() == 4
    with pytest.raises(PreconditionError):
        catalog.coalgebra("nosuch")
    with pytest.raises(PreconditionError):
        catalog.freyd_nondyadic(4)
