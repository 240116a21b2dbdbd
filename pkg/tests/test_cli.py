import json
import subprocess
import sys

import pytest

from braidkl.cli import main

from reference_data import SIMPLE_QSP_COUNTS, SP_COUNTS


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_kl_examples(capsys):
    code, out, _ = run(capsys, "kl", "--n", "4")
    assert code == 0 and out.splitlines()[0] == "P = 1 + t; Z = 1 + 7t + 7t^2 + t^3"
    assert "(agree)" in out
    code, out, _ = run(capsys, "kl", "--n", "1")
    assert out.splitlines()[0] == "P = 1; Z = 1"
    code, out, _ = run(capsys, "kl", "--n", "8", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["p"] == [1, 99, 1225, 735] and data["agree"]
    assert set(data["engines"]) == {"generic", "stirling", "genfun"}


def test_kl_engine_choice_and_limits(capsys):
    code, out, _ = run(capsys, "kl", "--n", "13", "--engine", "genfun", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "i,p,z" and len(out.splitlines()) == 14
    assert run(capsys, "kl", "--n", "14")[0] == 2
    assert run(capsys, "kl", "--n", "0")[0] == 2
    assert run(capsys, "kl", "--n", "10", "--engine", "generic")[0] == 2
    assert run(capsys, "kl", "--n", "9", "--engine", "genfun", "--order", "5")[0] == 2
    assert run(capsys, "kl")[0] == 2


def test_kl_graph_input(capsys, tmp_path):
    path = tmp_path / "k4.txt"
    path.write_text("# K4\n0 1 0\n0 2 1\n0 3 2\n1 2 3\n1 3 4\n2 3 5\n")
    code, out, _ = run(capsys, "kl", "--graph", str(path), "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["p"] == [1, 1] and data["z"] == [1, 7, 7, 1]
    path.write_text("0 0 0\n0 1 1\n")
    assert run(capsys, "kl", "--graph", str(path))[0] == 2
    assert run(capsys, "kl", "--graph", str(tmp_path / "missing.txt"))[0] == 2


def test_tables(capsys):
    code, out, _ = run(capsys, "tables", "--family", "sp", "--max-n", "7")
    rows = [line.split(",") for line in out.splitlines()]
    assert code == 0 and rows[0] == ["k\\n", "1", "2", "3", "4", "5", "6", "7"]
    for n, counts in SP_COUNTS.items():
        assert [int(rows[k + 1][n]) for k in range(n + 1)] == list(counts)
    code, out, _ = run(capsys, "tables", "--family", "qsp", "--max-n", "1")
    assert out.splitlines() == ["k\\n,1", "0,1", "1,1"]
    code, out, _ = run(capsys, "tables", "--family", "simple-qsp", "--max-n", "5", "--format", "json")
    data = json.loads(out)
    assert all(data["columns"][str(n)] == list(SIMPLE_QSP_COUNTS[n]) for n in range(1, 6))
    code, out, _ = run(capsys, "tables", "--family", "qsp", "--max-n", "3", "--format", "plain")
    assert out.splitlines()[2].split() == ["1", "1", "3", "7"]


def test_tables_limits(capsys):
    assert run(capsys, "tables", "--family", "sp", "--max-n", "8")[0] == 2
    assert run(capsys, "tables", "--family", "qsp", "--max-n", "9", "--extended")[0] == 2
    assert run(capsys, "tables", "--family", "qsp", "--max-n", "0")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["tables", "--family", "nope"])
    assert exc.value.code == 2


def test_verify_suites(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "cacti", "--format", "plain")
    assert code == 0
    assert "ok   k=4: #cacti on 7 vertices = (2k-3)!!(2k-1)^(k-2): 735 = 735" in out
    assert "ok   k=4: cactus -> matroid -> cactus roundtrip: true = true" in out
    code, out, _ = run(capsys, "verify", "--suite", "main", "--max-n", "4")
    data = json.loads(out)
    assert code == 0 and data["ok"] and data["first_failure"] is None
    row = next(c for c in data["checks"] if c["identity"] == "K_4: [t^1]Z = |A(3,2)|")
    assert row["lhs"] == row["rhs"] == 7
    code, out, _ = run(capsys, "verify", "--suite", "genfun", "--order", "10", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "suite,identity,lhs,rhs,ok"
    code, out, _ = run(capsys, "verify", "--suite", "equivariant", "--max-n", "4")
    data = json.loads(out)
    assert code == 0 and data["checks"][0]["lhs"] == {"1+1": 1, "2": 1}


def test_verify_limits(capsys):
    assert run(capsys, "verify", "--suite", "equivariant", "--max-n", "7")[0] == 2
    assert run(capsys, "verify", "--suite", "main", "--max-n", "9")[0] == 2
    assert run(capsys, "verify", "--suite", "relations", "--max-n", "8")[0] == 2


def test_verify_reports_first_mismatch(capsys, monkeypatch):
    import braidkl.cli as cli

    real = cli.count_table

    def skewed(family, n, extended=False):
        t = real(family, n, extended)
        if family == "simple-qsp" and n == 3:
            return type(t)(t.n, t.counts[:-1] + (t.counts[-1] + 1,))
        return t

    monkeypatch.setattr(cli, "count_table", skewed)
    code, out, err = run(capsys, "verify", "--suite", "main", "--max-n", "4")
    assert code == 1
    assert "mismatch: K_4: [t^0]P = |S(3,3)|" in err
    assert json.loads(out)["first_failure"] == "K_4: [t^0]P = |S(3,3)|"


def test_output_independent_of_jobs(capsys):
    a = run(capsys, "tables", "--family", "sp", "--max-n", "6", "--jobs", "1")[1]
    b = run(capsys, "tables", "--family", "sp", "--max-n", "6", "--jobs", "2")[1]
    assert a == b


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "braidkl", "kl", "--n", "5", "--engine", "stirling"],
        capture_output=True, text=True, check=True,
    )
    assert out.stdout.splitlines()[0] == "P = 1 + 5t; Z = 1 + 15t + 35t^2 + 15t^3 + t^4"
    assert out.stderr == ""
