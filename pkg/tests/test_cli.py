import json
import subprocess
import sys

import pytest

from vfgen.cli import run


def test_bracket(capsys):
    assert run(["bracket", "-n", "2", "z1^3 d2", "z2 d1"]) == 0
    assert capsys.readouterr().out.strip() == "z1^3 d1 + -3 z1^2*z2 d2"


def test_bracket_builtins(capsys):
    assert run(["bracket", "-n", "2", "U", "V"]) == 0
    assert capsys.readouterr().out.strip() == "8 z2^7 d1 + 4 z1^4*z2^3 d2"


def test_generate_then_verify(tmp_path, capsys):
    cert = tmp_path / "c.json"
    assert run(["generate", "-n", "2", "--target", "z1*z2 d1", "-o", str(cert)]) == 0
    out = capsys.readouterr().out
    assert "nodes:" in out and "depth:" in out and "max scalar bits:" in out
    assert run(["verify", "-n", "2", "--cert", str(cert), "--target", "z1*z2 d1"]) == 0
    assert run(["verify", "-n", "2", "--cert", str(cert), "--target", "z1 d1"]) == 1


def test_generate_to_stdout(capsys):
    assert run(["generate", "-n", "1", "--target", "d1"]) == 0
    cap = capsys.readouterr()
    doc = json.loads(cap.out)
    assert doc["n"] == 1 and "nodes:" in cap.err


def test_generate_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run(["generate", "-n", "3", "--target", "z1^2*z3 d2 + 1/2 d1", "-o", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_flow_blowup(capsys):
    assert run(["flow", "-n", "2", "--builtin", "V", "--start", "1,1", "--t-max", "0.2",
                "--detect-blowup"]) == 0
    out = capsys.readouterr().out
    assert "blow-up detected at t = 0.1428" in out


def test_flow_csv(tmp_path, capsys):
    path = tmp_path / "traj.csv"
    assert run(["flow", "-n", "2", "--field", "d2", "--start", "0,1+2j", "--t-max", "1",
                "--csv", str(path)]) == 0
    assert "reached t = 1" in capsys.readouterr().out
    lines = path.read_text().splitlines()
    assert lines[0] == "t,re_z1,im_z1,re_z2,im_z2"
    assert [float(x) for x in lines[-1].split(",")] == pytest.approx([1, 0, 0, 2, 2])


def test_flow_without_detection(capsys):
    assert run(["flow", "-n", "2", "--builtin", "V", "--start", "1,1", "--t-max", "0.2"]) == 0
    assert "step underflow" in capsys.readouterr().out


def test_nilpotent(capsys):
    assert run(["nilpotent", "-n", "2", "--field", "U"]) == 0
    assert "nilpotent: W^2" in capsys.readouterr().out
    assert run(["nilpotent", "-n", "1", "--field", "z1 d1"]) == 0
    assert "not nilpotent" in capsys.readouterr().out
    assert run(["nilpotent", "-n", "2", "--field", "V"]) == 0
    assert "inconclusive" in capsys.readouterr().out


def test_demo(capsys):
    assert run(["demo", "-n", "2"]) == 0
    out = capsys.readouterr().out
    assert "6720" in out and "z2^3 d1" in out
    assert "ad_U^5(V) = 6720 z2^3 d1" in out


@pytest.mark.parametrize("n", [1, 3])
def test_demo_other_dims(n, capsys):
    assert run(["demo", "-n", str(n)]) == 0
    assert "verified" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["bracket", "-n", "2", "z3 d1", "d1"],
    ["bracket", "-n", "2", "z1 ^ d1", "d1"],
    ["bracket", "-n", "0", "d1", "d1"],
    ["generate", "-n", "2"],
    ["verify", "-n", "2", "--cert", "/nonexistent.json", "--target", "d1"],
    ["flow", "-n", "2", "--builtin", "V", "--start", "1", "--t-max", "0.1"],
    ["flow", "-n", "2", "--start", "1,1", "--t-max", "0.1"],
    ["flow", "-n", "2", "--builtin", "V", "--start", "1,x", "--t-max", "0.1"],
    ["frobnicate"],
    [],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == 2
    capsys.readouterr()


def test_bad_certificate_file(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"n":2,"nodes":[{"op":"br","l":0,"r":1}],"root":0}')
    assert run(["verify", "-n", "2", "--cert", str(p), "--target", "d1"]) == 2
    assert "$.nodes[0]" in capsys.readouterr().err


def test_limits(capsys):
    assert run(["generate", "-n", "3", "--target", "d1", "--max-nodes", "10"]) == 3
    assert run(["flow", "-n", "2", "--builtin", "V", "--start", "1,1", "--t-max", "0.14",
                "--max-steps", "3"]) == 3
    capsys.readouterr()


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "vfgen", "bracket", "-n", "2", "z1 d2", "z2 d1"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.strip() == "z1 d1 + -1 z2 d2"
