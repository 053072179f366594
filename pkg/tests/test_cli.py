import json
import shutil
import subprocess

import pytest

from qsgkz.cli import main, parse_alpha


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_parse_alpha_forms():
    assert parse_alpha("-0.3,-0.4,-0.2") == (-0.3, -0.4, -0.2)
    assert parse_alpha("[-1.4, 0.3]") == (-1.4, 0.3)
    assert parse_alpha({"re": [-1.0, 0.5], "im": [0.1, 0.0]}) == (complex(-1, 0.1), 0.5)
    assert parse_alpha("-1/3,1+2j") == (pytest.approx(-1 / 3), 1 + 2j)


def test_validate(capsys):
    code, doc = run(capsys, "validate", "--input", "gauss")
    assert code == 0
    r = doc["result"]
    assert r["normalized_volume"] == 2 and len(r["nonresonance_rays"]) == 4
    assert r["alpha_status"]["nonresonant"]
    assert doc["metadata"]["conventions"]["index_base"] == 0


def test_invalid_instance_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"name": "bad", "B": [[1, -2]]}))
    code, doc = run(capsys, "validate", "--input", str(p))
    assert code == 1 and doc["error"] == "QuasiSymmetryViolation"


def test_wrong_alpha_length(capsys):
    code, doc = run(capsys, "validate", "--input", "gauss", "--alpha", "1,2")
    assert code == 1


def test_missing_file(capsys):
    code, doc = run(capsys, "validate", "--input", "/nonexistent/x.json")
    assert code == 1


def test_numeric_needs_alpha(tmp_path, capsys):
    p = tmp_path / "g.json"
    p.write_text(json.dumps({"name": "g", "B": [[1, 1, -1, -1]]}))
    code, doc = run(capsys, "numeric", "--input", str(p))
    assert code == 1


def test_numeric_rank_two_is_compute_error(capsys):
    code, doc = run(capsys, "numeric", "--input", "squarecross", "--alpha=-0.3,-0.3,-0.3,-0.3")
    assert code == 2


def test_arrangement(capsys):
    code, doc = run(capsys, "--command", "arrangement", "--input", "gauss")
    assert code == 0
    r = doc["result"]
    assert r["collinear_triples"] == 6
    assert sorted(tuple(w["J"]) for w in r["walls"]) == [(0, 1), (2, 3)]


def test_monodromy_symbolic_only_without_alpha(tmp_path, capsys):
    p = tmp_path / "g.json"
    p.write_text(json.dumps({"name": "g", "B": [[1, 1, -1, -1]]}))
    code, doc = run(capsys, "monodromy", "--input", str(p))
    assert code == 0
    assert "specialized" not in doc["result"]["theorem"]
    code, doc = run(capsys, "monodromy", "--input", "gauss")
    assert "specialized" in doc["result"]["ktheory"]


def test_ktheory(capsys):
    code, doc = run(capsys, "ktheory", "--input", "two_one_one", "--truncation", "5")
    assert code == 0 and doc["result"]["dual_basis"]
    assert all(f["psi_phi_identity"] for f in doc["result"]["faces"])


def test_numeric_and_output_file(tmp_path, capsys):
    out = tmp_path / "n.json"
    code = main(["numeric", "--input", "two_one_one", "--output", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert all(w["max_relative_error"] < 1e-6 for w in doc["result"]["walls"])


def test_verify_json_round_trip(tmp_path, capsys):
    out = tmp_path / "v.json"
    code = main(["verify", "--input", "two_one_one", "--output", str(out)])
    doc = json.loads(out.read_text())
    assert code == 0 and doc["result"]["ok"]
    assert json.loads(json.dumps(doc)) == doc


def test_console_script():
    exe = shutil.which("qsgkz")
    if exe is None:
        pytest.skip("console script not installed")
    proc = subprocess.run([exe, "validate", "--input", "two_one_one"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["result"]["normalized_volume"] == 2
