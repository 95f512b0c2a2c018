from __future__ import annotations

import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from conftest import DATA
from plumbcalc.cli import run, selftest
from plumbcalc.documents import dumps, loads, wrap
from plumbcalc.plumbing import same_dpg
from test_plumbing import dpg

SNAPSHOTS = Path(__file__).parent / "snapshots"


def call(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def d(name: str) -> str:
    return str(DATA / name)


def test_validate():
    code, out, _ = call("validate", d("shorthand.json"))
    assert code == 0 and json.loads(out) == {"kind": "dpg", "valid": True}


def test_validate_reports_structural_violations(tmp_path):
    doc = json.loads((DATA / "node.json").read_text())
    doc["edges"][0]["sign"] = 3
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    code, out, _ = call("validate", p)
    assert code == 1 and json.loads(out)["valid"] is False


def test_malformed_json_exits_two(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{"kind": "dpg",\n  "vertices": [}\n')
    code, out, err = call("validate", p)
    assert code == 2 and out == ""
    assert err.startswith("error: line 2, column")


def test_missing_file_and_bad_usage():
    assert call("validate", "/nonexistent/x.json")[0] == 2
    assert call("frobnicate")[0] == 2
    assert call()[0] == 2


def test_resolve_node_is_the_fixture():
    code, out, _ = call("resolve", d("two_lines.json"))
    assert code == 0 and out == (DATA / "node.json").read_text()


def test_normalize_with_trace():
    code, out, _ = call("normalize", d("node.json"), "--trace")
    assert code == 0
    assert json.loads(out)["trace"] == []
    code, out, _ = call("normalize", d("node.json"))
    assert out == (DATA / "node.json").read_text()


def test_normalize_rejects_indefinite_graphs():
    code, _, err = call("normalize", d("shorthand.json"))
    assert code == 2 and "error:" in err


def test_iform_and_seifert():
    code, out, _ = call("iform", d("node.json"))
    assert json.loads(out) == {"definiteness": "negative_definite", "determinant": -1, "matrix": [[-1]], "order": ["E1"]}
    code, out, _ = call("seifert", d("node.json"))
    assert json.loads(out)["euler"] == "-1"


def test_wgraph_and_reverse(tmp_path):
    code, out, _ = call("wgraph", d("node.json"))
    assert code == 0
    (v,) = json.loads(out)["vertices"]
    assert v["weight"] == [0, 2, 0]
    # the (-1) chain of the node has no dual
    assert call("reverse", d("node.json"))[0] == 2
    g = dpg({"v": (1, -1), "p": (0, -3), "w": (1, -1)}, [("v", "p"), ("p", "w")])
    src = tmp_path / "g.json"
    src.write_text(dumps(wrap(g)))
    code, out, _ = call("reverse", src)
    assert code == 0
    eulers = {v["id"]: v["euler"] for v in json.loads(out)["vertices"]}
    assert (eulers["v"], eulers["w"]) == (0, 0)
    back = tmp_path / "back.json"
    back.write_text(out)
    assert same_dpg(loads(call("reverse", back)[1]).value, g)


def test_equiv_exit_codes(tmp_path):
    assert call("equiv", d("node.json"), d("node.json"))[0] == 0
    code, out, _ = call("equiv", d("cuspidal_cubic.json"), d("nodal_cubic.json"))
    assert code == 1 and json.loads(out) == {"equivalent": False}
    assert call("equiv", d("node.json"), d("conic.json"))[0] == 2


def test_build_and_qt():
    code, out, _ = call("qt", "--type", "(2),(2),(2)")
    assert code == 0
    doc = json.loads(out)
    assert sum(1 for v in doc["vertices"] if v.get("str")) == 4
    code, out2, _ = call("build", d("qt_222.json"))
    assert code == 0 and out2 == out
    assert call("qt", "--type", "(2),(3),(2)")[0] == 2


def test_cover_commands():
    code, out, _ = call("gcover", d("cover_conic.json"))
    assert code == 0
    (v,) = json.loads(out)["vertices"]
    assert (v["g_theta"], v["e_theta"]) == (0, "2")
    code, out, _ = call("invariants", d("cover_pair_a.json"))
    rep = json.loads(out)
    assert rep["connected_number"] == 2 and rep["splitting_type"] == {"L1|L2": [1, 0]}
    code, out, _ = call("invariants", d("cover_pair_b.json"))
    assert json.loads(out)["connected_number"] == 1
    assert call("gequiv", d("cover_pair_a.json"), d("cover_pair_a.json"))[0] == 0
    code, out, _ = call("gequiv", d("cover_pair_a.json"), d("cover_pair_b.json"))
    assert code == 1 and json.loads(out) == {"equivalent": False}


def test_group_and_assignment_flags():
    code, out, _ = call("gcover", d("conic.json"), "--group", "Z/2", "--assign", "C=1")
    assert code == 0
    assert len(json.loads(out)["vertices"]) == 1
    code, out, _ = call("gcover", d("conic.json"), "--group", "Z/2", "--assign", "C=0")
    assert len(json.loads(out)["vertices"]) == 2
    assert call("gcover", d("conic.json"))[0] == 2
    assert call("gcover", d("conic.json"), "--group", "Q8", "--assign", "C=1")[0] == 2
    assert call("gcover", d("conic.json"), "--group", "Z/2", "--assign", "C")[0] == 2


def test_dot_snapshot():
    code, out, _ = call("dot", d("shorthand.json"))
    assert code == 0 and out == (SNAPSHOTS / "shorthand.dot").read_text()
    code, out, _ = call("normalize", d("node.json"), "--format", "dot")
    assert out.startswith('graph "dpg" {')
    code, out, _ = call("invariants", d("cover_pair_a.json"), "--format", "dot")
    assert code == 0 and out.startswith('graph "splitting" {')
    assert call("iform", d("node.json"), "--format", "dot")[0] == 2


def test_out_flag(tmp_path):
    target = tmp_path / "nf.json"
    code, out, _ = call("normalize", d("node.json"), "--out", target)
    assert code == 0 and out == ""
    assert target.read_text() == (DATA / "node.json").read_text()


def test_selftest(monkeypatch):
    monkeypatch.setenv("PLUMBCALC_SEED", "7")
    code, out, _ = call("selftest", "--count", "10")
    assert code == 0
    rep = json.loads(out)
    assert rep["seed"] == 7
    assert call("selftest", "--count", "10")[1] == out
    monkeypatch.setenv("PLUMBCALC_SEED", "seven")
    assert call("selftest")[0] == 2


def test_selftest_counts():
    rep = selftest(3, 5)
    assert rep["checks"]["dual_involution"] == {"passed": 5, "failed": 0}
    assert rep["checks"]["normal_form_law"]["failed"] == 0


def test_console_script_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "plumbcalc.cli", "validate", d("conic.json")],
        capture_output=True,
        text=True,
        check=False,
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["kind"] == "curvespec"


@pytest.mark.parametrize("argv", [("--version",)])
def test_version(argv, capsys):
    assert call(*argv)[0] == 0
