import json
import shutil

import pytest

from qptolemy.catalog import FIXTURE_ENV, fixture_path
from qptolemy.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_ok(capsys):
    code, out, _ = run(capsys, "validate")
    assert code == 0
    assert "four-holed-sphere (7e77cd5fccd5): pass" in out


def test_verify_class_text(capsys):
    code, out, _ = run(capsys, "verify", "--all", "--class")
    assert code == 0
    assert "lift shift k = -12" in out
    assert "12·chi + e_1 + e_2 + e_3 + e_4 over A = <z^{-12}>" in out
    assert "derivation D12 D23 D13 = z^-12 D2 D1 D0 D3" in out


def test_verify_json_is_deterministic(capsys):
    args = ("verify", "--all", "--class", "--format", "json", "--seed", "3", "--samples", "20")
    code, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert code == 0 and first == second
    doc = json.loads(first)
    assert doc["config"]["seed"] == 3
    assert doc["fixtures"]["two-holed-torus"].startswith("ae1d2529")
    assert doc["class"]["chi"] == 12 and doc["class"]["euler"] == [1, 1, 1, 1]
    chain = next(r for r in doc["relations"] if r["relation"] == "Chain")
    assert (chain["zexp"], chain["normalized"]) == (-24, -144)


def test_verify_single_relation(capsys):
    code, out, _ = run(capsys, "verify", "--fixture", "torus", "--relation", "Braid1", "--search")
    assert code == 0
    assert "Braid1: script 0, search 0 (agree)" in out


def test_verify_needs_a_selection(capsys):
    code, _, err = run(capsys, "verify")
    assert code == 2 and "--relation" in err


def test_script_command(capsys):
    code, out, _ = run(capsys, "script", "--fixture", "torus", "--script", "Db.reduced")
    assert code == 0
    assert "phase delta -3" in out and "27 steps" in out


def test_script_wrong_word(capsys):
    code, _, err = run(capsys, "script", "--script", "Db.reduced", "--to", "Da@reduced")
    assert code == 1 and err.startswith("FinalWordMismatch")
    code, _, err = run(capsys, "script", "--script", "Db.reduced", "--from", "Da")
    assert code == 1 and err.startswith("ScriptStepFailed: step 0")


def test_simplify_writes_script(capsys, tmp_path):
    out_file = tmp_path / "da.json"
    code, out, _ = run(capsys, "simplify", "--word", "Da", "--out", str(out_file))
    assert code == 0 and "to   z^-1 F4 F3 P(2 4 3)" in out
    code, out, _ = run(capsys, "script", "--script-file", str(out_file), "--from", "Da", "--to", "Da@reduced")
    assert code == 0 and "phase delta -1" in out


def test_reconstruct_words(capsys):
    code, out, _ = run(capsys, "reconstruct", "--word", "F1 P(2 3)", "--arcs", "3", "--genus", "1", "--punctures", "1")
    assert code == 0 and out.startswith("2 candidate(s)")
    code, _, _ = run(capsys, "reconstruct", "--word", "F1 F1 F2", "--arcs", "3", "--genus", "1", "--punctures", "1")
    assert code == 1


def test_io_errors(capsys, tmp_path):
    assert run(capsys, "validate", "--fixture", str(tmp_path / "none.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "validate", "--fixture", str(bad))[0] == 2
    assert run(capsys, "verify", "--all", "--tol", "0")[0] == 2


def test_corrupted_triangle(capsys, tmp_path):
    doc = json.loads(fixture_path("sphere").read_text())
    doc["triangulation"]["triangles"][3] = [5, 0, 1]
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "validate", "--fixture", str(path))
    assert code == 1 and "triangle 3" in out


def test_fixture_env(capsys, tmp_path, monkeypatch):
    shutil.copy(fixture_path("torus"), tmp_path / "two-holed-torus.json")
    monkeypatch.setenv(FIXTURE_ENV, str(tmp_path))
    code, out, _ = run(capsys, "validate", "--fixture", "torus")
    assert code == 0 and "two-holed-torus" in out
    assert run(capsys, "validate")[0] == 2  # the sphere is not in that directory


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert capsys.readouterr().out.startswith("qptolemy 0.1.0")
