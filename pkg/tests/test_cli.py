from __future__ import annotations

import json
import subprocess
import sys

import pytest

from selfsim import catalog, jsonio
from selfsim.fincat import FinCategory
from selfsim.finmod import hom_system
from selfsim.cli import run

HALF2 = '{"base_object": "1", "prefix": ["[0,1/2]"], "cycle": ["[1/2,1]"]}'
HALF3 = '{"base_object": "1", "prefix": ["[1/2,1]"], "cycle": ["[0,1/2]"]}'
TWO_THIRDS = '{"base_object": "1", "cycle": ["[1/2,1]", "[0,1/2]"]}'
ONE_THIRD = '{"base_object": "1", "cycle": ["[0,1/2]", "[1/2,1]"]}'


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, out


def call_json(capsys, *argv):
    code, out = call(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def freyd_file(tmp_path):
    p = tmp_path / "freyd.json"
    p.write_text(jsonio.dumps(catalog.build("freyd(2)").to_json()))
    return str(p)


def test_validate_catalog_and_file(capsys, freyd_file):
    code, doc = call_json(capsys, "validate", "freyd(2)")
    assert code == 0
    assert doc["sector_counts"] == {"0|0": 1, "0|1": 3, "1|0": 0, "1|1": 2}
    code2, doc2 = call_json(capsys, "validate", freyd_file)
    assert code2 == 0 and doc2 == doc


def test_validate_reports_broken_module(capsys, tmp_path):
    cat = FinCategory(
        ["0", "1", "2"],
        [("sigma", "0", "1"), ("tau", "0", "1"), ("u", "1", "2"), ("v", "0", "2"), ("w", "0", "2")],
        {("u", "sigma"): "v", ("u", "tau"): "w"},
    )
    doc = hom_system(cat).to_json()
    doc["module"]["right"]["u|sigma"] = "w"
    p = tmp_path / "broken.json"
    p.write_text(json.dumps(doc))
    code, out = call_json(capsys, "validate", str(p))
    assert code == 1
    assert out["system"]["ok"] is False


def test_malformed_json_points_at_location(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"category": {"objects": ["0"]}, "module": {"sectors": [{"id": "m", "src": "0"}]}}')
    code, doc = call_json(capsys, "validate", str(p))
    assert code == 3
    assert doc == {"error": "input", "pointer": "/module/sectors/0/tgt", "message": "missing field"}
    p.write_text("{")
    code, doc = call_json(capsys, "validate", str(p))
    assert code == 3 and "malformed JSON" in doc["message"]


def test_unknown_input_and_bad_flags(capsys):
    assert call(capsys, "validate", "nosuch(3)")[0] == 3
    assert call(capsys, "components", "freyd(2)", "--at", "7")[0] == 3
    assert call(capsys, "components", "freyd(2)", "--budget", "0")[0] == 3
    assert call(capsys, "frobnicate", "freyd(2)")[0] == 3


def test_solvable_codes(capsys, tmp_path):
    assert call_json(capsys, "solvable", "freyd(2)")[0] == 0
    assert call_json(capsys, "solvable", "walks(original,6)")[0] == 2
    S = hom_system(FinCategory(["0", "1"], [("sigma", "0", "1"), ("tau", "0", "1")], {}))
    p = tmp_path / "hom.json"
    p.write_text(jsonio.dumps(S.to_json()))
    code, doc = call_json(capsys, "solvable", str(p))
    assert code == 1 and doc["verdict"] == "Fails"


def test_components_csv(capsys):
    code, out = call(capsys, "components", "freyd(2)", "--depth", "4", "--csv")
    assert code == 0
    assert out == "depth,count\n0,1\n1,1\n2,1\n3,1\n4,1\n"


def test_complexes_count(capsys):
    code, doc = call_json(capsys, "complexes", "cantor(2)", "--depth", "3")
    assert doc["count"] == 8


def test_equal_verdicts(capsys):
    code, doc = call_json(capsys, "equal", "freyd(2)", "--lasso", HALF2, "--lasso", HALF3)
    assert code == 0 and doc["verdict"] == "Equal"
    code, doc = call_json(capsys, "equal", "freyd(2)", "--lasso", TWO_THIRDS, "--lasso", ONE_THIRD, "--depth", "8")
    assert code == 2 and doc["verdict"] == "Inconclusive"
    code, doc = call_json(capsys, "equal", "cantor(2)", "--at", "*", "--lasso",
                          '{"base_object": "*", "cycle": ["0"]}', "--lasso", '{"base_object": "*", "cycle": ["1"]}')
    assert code == 1


def test_distance_profile(capsys):
    code, doc = call_json(capsys, "distance", "freyd(2)", "--lasso", TWO_THIRDS, "--lasso", ONE_THIRD, "--depth", "5")
    assert doc["profile"] == [1, 1, 3, 5, 11]


def test_bad_lasso_is_input_error(capsys):
    code, doc = call_json(capsys, "equal", "freyd(2)", "--lasso", '{"base_object": "1", "cycle": ["0"]}',
                          "--lasso", HALF2)
    assert code == 3 and doc["pointer"] == "/lasso/0"


def test_coalgebra_verbs(capsys):
    code, doc = call_json(capsys, "resolve", "freyd_grid(3)", "--element", "1/2", "--depth", "2")
    assert code == 0 and len(doc["resolutions"]) == 5
    code, doc = call_json(capsys, "terminal-map", "cantor_stream(2,3)", "--at", "*", "--element", "011", "--depth", "4")
    assert code == 0 and doc["sectors"] == ["0", "1", "1", "0"]
    assert call(capsys, "resolve", "freyd_grid(3)", "--element", "5/9")[0] == 3


def test_coalgebra_file_with_system(capsys, tmp_path, freyd_file):
    C = catalog.freyd_three_point()
    p = tmp_path / "coalg.json"
    p.write_text(jsonio.dumps(C.to_json()))
    code, doc = call_json(capsys, "terminal-map", str(p), "--system", freyd_file, "--element", "2/3")
    assert code == 0
    assert call(capsys, "terminal-map", str(p), "--element", "2/3")[0] == 3


def test_classify(capsys):
    code, doc = call_json(capsys, "classify", "convergent_sequence")
    assert doc == {"1": {"class": "Singleton"},
                   "2": {"class": "Mixed", "witness": {"singleton": "1", "prefix": ["1>2"], "cycle": ["1>1"]}}}


def test_recognize_and_figure(capsys, tmp_path):
    fig = tmp_path / "s.png"
    code, doc = call_json(capsys, "recognize", "sierpinski(2)", "--figure", str(fig))
    assert code == 0 and doc["crude"]["lambda_exact"] == "1/2"
    assert fig.read_bytes()[:4] == b"\x89PNG"
    code, doc = call_json(capsys, "recognize", "freyd(2)", "--coalgebra", "freyd_nondyadic(7)", "--element", "3/7")
    assert doc["approximants"]["nested"] is True
    assert call(capsys, "recognize", "julia")[0] == 3


def test_decay_and_render(capsys, tmp_path):
    code, out = call(capsys, "decay", "freyd(2)", "--depth", "3", "--csv")
    assert out == "depth,diameter\n0,1.0\n1,0.5\n2,0.25\n3,0.125\n"
    fig = tmp_path / "decay.png"
    code, doc = call_json(capsys, "decay", "barycentric(2)", "--depth", "3", "--figure", str(fig), "--ratio", "0.6667")
    assert fig.exists() and doc["figure"] == str(fig)
    code, out = call(capsys, "render", "sierpinski(2)", "--depth", "5", "--csv")
    assert len(out.strip().splitlines()) == 244
    code, out = call(capsys, "render", "sierpinski(2)", "--depth", "2", "--svg")
    assert out.count('class="cell"') == 9


def test_realize_sources(capsys, tmp_path):
    code, doc = call_json(capsys, "realize", "dyadic(17,5)")
    assert code == 0 and doc["fixed_point"]["ok"] is True
    code, doc = call_json(capsys, "realize", "binary(4)")
    assert code == 0 and doc["check"]["ok"] is True
    p = tmp_path / "covers.json"
    p.write_text(json.dumps({"points": ["a", "b", "c"], "levels": [[["a", "b", "c"]], [["a", "b"], ["b", "c"]]]}))
    code, doc = call_json(capsys, "realize", str(p))
    assert code == 1


def test_examples(capsys):
    code, doc = call_json(capsys, "examples", "list")
    assert [r["name"] for r in doc["examples"]] == catalog.names()
    code, doc = call_json(capsys, "examples", "dump", "cantor(3)")
    assert len(doc["module"]["sectors"]) == 3


def test_resource_cap(capsys):
    code, doc = call_json(capsys, "complexes", "cantor(2)", "--depth", "20", "--budget", "100")
    assert code == 4 and doc["error"] == "resource cap"


def test_output_file(capsys, tmp_path):
    out = tmp_path / "o.json"
    assert call(capsys, "solvable", "freyd(2)", "--out", str(out))[1] == ""
    assert json.loads(out.read_text())["verdict"] == "Holds"


@pytest.mark.parametrize("argv", [
    ["equal", "freyd(2)", "--lasso", TWO_THIRDS, "--lasso", ONE_THIRD, "--depth", "7"],
    ["components", "sierpinski(2)", "--depth", "3"],
    ["render", "barycentric(2)", "--depth", "2", "--csv"],
])
def test_output_is_deterministic(capsys, argv):
    first = call(capsys, *argv)
    second = call(capsys, *argv, "--seed", "99")
    assert first == second


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "selfsim", "solvable", "freyd(2)"], capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["verdict"] == "Holds"
