from __future__ import annotations

import json
import subprocess
import sys

import pytest

from conftest import DATA
from twonormal.cli import from_csv, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_builtin(capsys):
    code, out, _ = run(capsys, "validate", "double2")
    assert code == 0
    assert "V=4 E=6 F=4 T=2" in out and "closed: yes" in out
    assert "edge degrees: 2 2 2 2 2 2" in out


def test_validate_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.tri"
    bad.write_text("tet 0: - - - -\ntet 1: 0:0123 - -\n")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 2 and "line 2" in err


def test_validate_missing_file(capsys):
    code, _, _ = run(capsys, "validate", "/nonexistent/file.tri")
    assert code == 2


def test_require_closed(capsys):
    assert run(capsys, "validate", "tet1")[0] == 0
    assert run(capsys, "validate", "tet1", "--require-closed")[0] == 1


def test_enumerate_normal_json(capsys):
    code, out, _ = run(capsys, "enumerate", "--mode", "normal", "double2", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) >= {"version", "triangulation", "layout", "surfaces"}
    assert doc["triangulation"] == {"tets": 2, "V": 4, "E": 6, "F": 4, "T": 2}
    assert len(doc["layout"]) == 32
    spheres = [s for s in doc["surfaces"] if sum(s["vector"]) == 2 and s["chi"] == 2]
    assert len(spheres) >= 4
    for s in doc["surfaces"]:
        assert set(s) == {"vector", "tubes", "class", "chi", "components", "edge_weights"}
        assert all(set(c) == {"chi", "orientable", "sphere"} for c in s["components"])


def test_enumerate_two_normal_classes(capsys):
    code, out, _ = run(capsys, "enumerate", "--mode", "2normal", str(DATA / "z2_t1_0.tri"))
    assert code == 0
    classes = {s["class"] for s in json.loads(out)["surfaces"]}
    assert classes and classes <= {"TwoOctagons", "TwoTubes", "OctagonAndTube", "Dodecagon"}


def test_enumerate_almost_one_exceptional(capsys):
    code, out, _ = run(capsys, "enumerate", "--mode", "almost", "double2")
    for s in json.loads(out)["surfaces"]:
        octs = sum(x for label, x in zip(json.loads(out)["layout"], s["vector"]) if ":oct" in label)
        assert octs + len(s["tubes"]) == 1


def test_csv_matches_json(capsys):
    _, js, _ = run(capsys, "enumerate", "--mode", "almost", "double2", "--format", "json")
    _, cs, _ = run(capsys, "enumerate", "--mode", "almost", "double2", "--format", "csv")
    assert from_csv(cs) == json.loads(js)["surfaces"]


def test_text_format(capsys):
    code, out, _ = run(capsys, "enumerate", "double2", "--format", "text")
    assert code == 0 and out.startswith("triangulation: T=2")


def test_guard(capsys):
    code, _, err = run(capsys, "enumerate", "double2", "--max-tets", "1")
    assert code == 3 and "max-tets" in err


def test_enumerate_open_input(capsys):
    assert run(capsys, "enumerate", "tet1")[0] == 1


def test_output_file(capsys, tmp_path):
    dest = tmp_path / "out.json"
    assert run(capsys, "enumerate", "double2", "-o", str(dest))[0] == 0
    assert json.loads(dest.read_text())["surfaces"]


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0
    assert "lengths observed ⊆ {3} ∪ 4ℤ⁺" in out
    assert "dodecagon families: 6" in out


def test_selftest_fault(capsys):
    code, _, err = run(capsys, "selftest", "--inject-fault")
    assert code == 1 and "curve lengths" in err


def test_selftest_curve_bound(capsys):
    assert run(capsys, "selftest", "--max-curve-length", "32")[0] == 3


def test_ghs_compare(capsys):
    assert run(capsys, "ghs-compare", "0", "2")[1].strip() == "greater"
    assert run(capsys, "ghs-compare", "-2", "0;0")[1].strip() == "greater"
    assert run(capsys, "ghs-compare", "0;2", "2;0")[1].strip() == "equal"
    assert run(capsys, "ghs-compare", "x", "0")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "twonormal", "validate", "double2"], capture_output=True, text=True)
    assert proc.returncode == 0 and "T=2" in proc.stdout


@pytest.mark.parametrize("fmt", ["json", "csv", "text"])
def test_deterministic_formats(capsys, fmt):
    a = run(capsys, "enumerate", "--mode", "2normal", "double2", "--format", fmt)[1]
    b = run(capsys, "enumerate", "--mode", "2normal", "double2", "--format", fmt)[1]
    assert a == b
