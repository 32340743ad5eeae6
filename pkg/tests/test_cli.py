import json
import subprocess
import sys

import pytest

from motzkin_automata import cli
from motzkin_automata.oracle import read_table


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval(capsys):
    assert run(capsys, "eval", "--prime", "5", "--n", "23")[:2] == (0, "0\n")
    assert run(capsys, "eval", "--prime", "7", "--n", "15")[1] == "3\n"


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--prime", "4", "--n", "3"],
        ["eval", "--prime", "3", "--n", "3"],
        ["eval", "--prime", "x", "--n", "3"],
        ["eval", "--prime", "5", "--n", "-1"],
        ["oracle", "--prime", "5", "--limit", str(10**8 + 1)],
        ["density", "--prime", "5", "--residue", "5", "--limit", "10"],
        ["density", "--prime", "5", "--residue", "0", "--limit", "0"],
        ["verify", "--prime", "7", "--limit", "10", "--suite", "classical"],
        ["criterion"],
        ["criterion", "--scan"],
        ["eval", "--prime", "5", "--n", "1", "--threads", "0"],
        ["nonsense"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_prime_message(capsys):
    assert "4 is not prime" in run(capsys, "eval", "--prime", "4", "--n", "1")[2]


def test_build_and_load(tmp_path, capsys):
    path = tmp_path / "m7.json"
    assert run(capsys, "build", "--prime", "7", "--out", str(path))[0] == 0
    code, out, _ = run(capsys, "eval", "--prime", "7", "--n", "15", "--automaton", str(path))
    assert (code, out) == (0, "3\n")
    assert run(capsys, "eval", "--prime", "11", "--n", "1", "--automaton", str(path))[0] == 2
    path.write_text("{}")
    assert run(capsys, "eval", "--prime", "7", "--n", "1", "--automaton", str(path))[0] == 2
    code, out, _ = run(capsys, "build", "--prime", "5")
    assert json.loads(out)["p"] == 5


def test_oracle(tmp_path, capsys):
    code, out, _ = run(capsys, "oracle", "--prime", "7", "--limit", "5")
    assert out.split("\n")[:6] == ["0\t1", "1\t1", "2\t2", "3\t4", "4\t2", "5\t0"]
    path = tmp_path / "t.bin"
    assert run(capsys, "oracle", "--prime", "7", "--limit", "300", "--out", str(path), "--method", "convolution")[0] == 0
    assert read_table(path).n_max == 300


def test_series(capsys):
    out = run(capsys, "series", "--n", "3")[1]
    assert out == "0\t1\t0\t0\n1\t1\t0\t0\n2\t0\t-1\t-1\n3\t-1\t-2\t-2\n"


def test_density_json(capsys):
    code, out, _ = run(capsys, "density", "--prime", "5", "--residue", "0", "--limit", "1000", "--format", "json")
    row = json.loads(out)
    assert code == 0 and row["reference_kind"] == "exact" and row["p"] == 5


def test_density_text_and_timing(capsys):
    code, out, err = run(capsys, "density", "--prime", "7", "--residue", "0", "--limit", "1000", "--timing")
    assert code == 0 and "reference_kind=lower-bound" in out
    assert "[timing]" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["--prime", "7", "--limit", "5000", "--suite", "oracle"],
        ["--prime", "11", "--limit", "0", "--suite", "tables"],
        ["--prime", "5", "--limit", "20000", "--suite", "forms"],
        ["--prime", "2", "--limit", "3000", "--suite", "classical"],
        ["--prime", "3", "--limit", "3000", "--suite", "classical"],
    ],
)
def test_verify_passes(capsys, argv):
    code, out, _ = run(capsys, "verify", *argv)
    assert code == 0
    assert out.startswith("status=PASS")


def test_verify_detects_tampering(tmp_path, capsys):
    path = tmp_path / "m.json"
    run(capsys, "build", "--prime", "5", "--out", str(path))
    doc = json.loads(path.read_text())
    # reroute digit 1 out of the initial state to the zero state
    zero = next(s["id"] for s in doc["states"] if s["poly"] == [])
    doc["delta"][0][1] = zero
    path.write_text(json.dumps(doc))
    code, out, err = run(capsys, "verify", "--prime", "5", "--limit", "100", "--suite", "oracle", "--automaton", str(path))
    assert code == 1
    assert out.startswith("status=FAIL")
    assert "n=1" in err


def test_criterion(capsys):
    code, out, _ = run(capsys, "criterion", "--prime", "7")
    assert code == 0
    assert "cpd\t3\t0" in out
    assert "density_one_digit=3" in out
    code, out, _ = run(capsys, "criterion", "--prime", "13", "--format", "json")
    row = json.loads(out)
    assert row["density_one_digit"] is None and row["forbidden"] == []


def test_criterion_scan(capsys):
    code, out, _ = run(capsys, "criterion", "--scan", "--max-prime", "20", "--format", "json")
    rows = [json.loads(line) for line in out.splitlines()]
    assert [r["p"] for r in rows] == [5, 7, 11, 13, 17, 19]
    assert [r["density_one_digit"] for r in rows] == [None, 3, None, None, 5, 4]


def test_export_dot(tmp_path, capsys):
    code, out, _ = run(capsys, "export-dot", "--prime", "7", "--collapse")
    assert code == 0 and out.startswith('digraph "motzkin_mod_7"')
    path = tmp_path / "m.dot"
    run(capsys, "export-dot", "--prime", "5", "--out", str(path))
    assert "__start" in path.read_text()


def test_output_is_deterministic(capsys):
    first = run(capsys, "build", "--prime", "11")[1]
    assert run(capsys, "build", "--prime", "11")[1] == first


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "motzkin_automata", "eval", "--prime", "11", "--n", "10"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout == "10\n"
