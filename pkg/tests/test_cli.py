import json

import pytest

from periodforge.cli import main


def write(tmp_path, name, n, rows, d=0):
    p = tmp_path / name
    p.write_text(json.dumps({"n": n, "d": d, "matrix": rows}))
    return str(p)


@pytest.fixture
def files(tmp_path):
    z = ["0"] * 6
    return {
        "w1": write(tmp_path, "w1.json", 3, [["1", "0", "0", "0", "0", "0"], ["0", "1", "0", "0", "0", "0"]]),
        "w2": write(tmp_path, "w2.json", 3, [["2", "0", "1", "0", "1", "0"], ["0", "1", "0", "0", "0", "0"]]),
        "zero": write(tmp_path, "zero.json", 3, [z, z]),
        "neg": write(tmp_path, "neg.json", 3, [["0", "1", "0", "0", "0", "0"], ["1", "0", "0", "0", "0", "0"]]),
        "s2": write(tmp_path, "s2.json", 3, [["1", "0", "sqrt(2)", "0", "1", "0"], ["0", "1", "0", "0", "0", "1"]], 2),
        "g2": write(tmp_path, "g2.json", 2, [["2", "0", "1", "0"], ["0", "1", "0", "0"]]),
    }


def test_classify_text(files, capsys):
    assert main(["classify", files["w1"]]) == 0
    assert "LatticeObstructed, d(rho)=6" in capsys.readouterr().out
    assert main(["classify", files["zero"]]) == 0
    assert "Trivial, d(rho)=8" in capsys.readouterr().out
    assert main(["classify", files["neg"]]) == 0
    assert "ObstructionOneFails" in capsys.readouterr().out


def test_classify_json(files, capsys):
    assert main(["classify", files["w2"], "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["verdict"] == "RealizableAbelian" and doc["torus_degree"] == 2


def test_degree(files, capsys):
    assert main(["degree", files["s2"]]) == 0
    assert "d(rho) = 4" in capsys.readouterr().out


def test_realize_lattice_and_reverify(files, tmp_path, capsys):
    out = str(tmp_path / "s.json")
    assert main(["realize", files["w2"], "-o", out]) == 0
    text = capsys.readouterr().out
    assert "path: lattice_normal_form" in text and "result: PASS" in text
    assert main(["verify", out]) == 0


def test_realize_is_byte_identical(files, tmp_path, capsys):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert main(["realize", files["s2"], "-o", a, "--format", "json"]) == 0
    first = capsys.readouterr().out
    assert main(["realize", files["s2"], "-o", b, "--format", "json"]) == 0
    second = capsys.readouterr().out
    assert open(a).read() == open(b).read()
    assert first.replace(a, "X") == second.replace(b, "X")
    assert json.loads(first)["path"] == "xplus_search"


def test_realize_meromorphic(files, tmp_path, capsys):
    out = str(tmp_path / "m.json")
    assert main(["realize", files["w1"], "-o", out]) == 0
    assert "meromorphic_A" in capsys.readouterr().out
    assert main(["verify", out, "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["pole_faces"] == 1 and doc["genus"] == 3 and doc["branching"] == 6


def test_realize_refuses_small_genus(files, capsys):
    assert main(["realize", files["g2"]]) == 3
    assert "n >= 3" in capsys.readouterr().err


def test_realize_abelian_mode_on_obstructed(files, capsys):
    assert main(["realize", files["w1"], "--mode", "abelian"]) == 1


def test_realize_zero_character(files, capsys):
    assert main(["realize", files["zero"]]) == 1


def test_inconclusive_exit_code(files, capsys):
    assert main(["realize", files["s2"], "--budget", "0"]) == 2
    assert "inconclusive" in capsys.readouterr().out
    assert main(["reduce", files["s2"], "--budget", "0"]) == 2


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 3,\n "d": 0, "matrix": [}')
    assert main(["classify", str(bad)]) == 3
    assert "line 2" in capsys.readouterr().err
    assert main(["classify", str(tmp_path / "missing.json")]) == 3


def test_reduce_normal_form_is_identity(files, tmp_path, capsys):
    out = str(tmp_path / "t.json")
    assert main(["reduce", files["w2"], "-o", out, "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["trace"]["steps"] == []
    assert json.load(open(out))["path"] == "lattice_normal_form"


def test_verify_corrupted_surface(files, tmp_path, capsys):
    out = tmp_path / "s.json"
    assert main(["realize", files["w2"], "-o", str(out)]) == 0
    capsys.readouterr()
    doc = json.loads(out.read_text())
    doc["pairing"][0], doc["pairing"][1] = [doc["pairing"][0][0], doc["pairing"][1][1]], [doc["pairing"][1][0], doc["pairing"][0][1]]
    doc["edges"][0]["vector"] = ["5/1", "0/1"]
    out.write_text(json.dumps(doc))
    assert main(["verify", str(out)]) == 1
    assert "[FAIL] structure" in capsys.readouterr().out


def test_pipeline_reduce_realize_verify(files, tmp_path, capsys):
    t, s = str(tmp_path / "t.json"), str(tmp_path / "s.json")
    assert main(["reduce", files["w2"], "-o", t]) == 0
    assert main(["realize", files["w2"], "-o", s]) == 0
    assert main(["verify", s]) == 0
