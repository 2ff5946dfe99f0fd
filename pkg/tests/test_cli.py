import csv
import io
import json
import subprocess
import sys

import pytest

from cglearn import __version__
from cglearn.cli import main
from cglearn.evaluate import evaluate
from cglearn.graph import pattern_of, read_graph, write_graph


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _csv_body(text):
    return list(csv.reader(io.StringIO("".join(l for l in text.splitlines(True) if not l.startswith("#")))))


def test_version(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.strip() == f"cglearn {__version__}"


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "cglearn.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == f"cglearn {__version__}"


def test_generate_is_byte_identical(workdir):
    argv = ["generate", "--p", "5", "--N", "2", "--n", "100", "--seed", "7", "--out-graph", "g.cg", "--out-data", "d.csv"]
    assert main(argv) == 0
    first = (workdir / "g.cg").read_bytes(), (workdir / "d.csv").read_bytes()
    assert main(argv) == 0
    assert first == ((workdir / "g.cg").read_bytes(), (workdir / "d.csv").read_bytes())
    for name in ("g.cg", "d.csv"):
        lines = (workdir / name).read_text().splitlines()
        assert lines[0] == f"# cglearn {__version__}"
        assert lines[1] == "# command: cglearn " + " ".join(argv)
        assert lines[2] == "# seed: 7"


def test_learn_cg_ex4(workdir, ex4):
    write_graph(ex4, "ex4.cg")
    assert main(["learn-cg", "--graph", "ex4.cg", "--oracle", "--algo", "gs", "--out", "out.pat", "--trace", "t.json"]) == 0
    assert read_graph("out.pat", pattern=True) == pattern_of(ex4)
    text = (workdir / "out.pat").read_text()
    assert text.startswith(f"# cglearn {__version__}\n")
    assert "0 => 3\n1 -- 2\n1 => 3\n2 -- 3\n" in text
    trace = json.loads((workdir / "t.json").read_text())
    assert trace["skeleton"] == [[0, 3], [1, 2], [1, 3], [2, 3]]


def test_evaluate_matches_library(workdir, capsys, ex16):
    write_graph(ex16, "truth.cg")
    learned = pattern_of(ex16)
    noisy = type(learned)(learned.p, set(learned.directed), set(learned.undirected) - {min(learned.undirected)}, learned.labels)
    write_graph(noisy, "x.pat")
    assert main(["evaluate", "--learned", "x.pat", "--truth", "truth.cg"]) == 0
    rows = _csv_body(capsys.readouterr().out)
    assert rows[0] == ["tpr", "fpr", "tdr", "acc", "shd"] and len(rows) == 2
    rep = evaluate(noisy, ex16)
    got = [float(x) for x in rows[1]]
    assert got == pytest.approx([rep.tpr, rep.fpr, rep.tdr, rep.acc, rep.shd])


def test_evaluate_rejects_mismatched_p(workdir, ex16, ex4):
    write_graph(ex16, "a.cg")
    write_graph(pattern_of(ex4), "b.pat")
    assert main(["evaluate", "--learned", "b.pat", "--truth", "a.cg"]) == 2


def test_learn_mb_outputs(workdir, capsys, ex16):
    write_graph(ex16, "ex16.cg")
    assert main(["learn-mb", "--graph", "ex16.cg", "--oracle", "--target", "15"]) == 0
    rows = _csv_body(capsys.readouterr().out)
    assert rows[0] == ["role", "vertex", "sepset"]
    members = {int(r[1]) for r in rows if r[0] == "member"}
    assert members == {2, 5, 6, 7, 10, 11}
    assert rows[-1][0] == "test_count" and int(rows[-1][2]) > 0


def test_learn_mb_by_column_name(workdir, capsys):
    assert main(["generate", "--p", "6", "--N", "2", "--n", "300", "--seed", "1", "--out-graph", "g.cg", "--out-data", "d.csv"]) == 0
    assert main(["learn-mb", "--data", "d.csv", "--target", "X2", "--algo", "iamb", "--out", "mb.csv"]) == 0
    assert (workdir / "mb.csv").read_text().startswith("# cglearn")
    assert main(["learn-mb", "--data", "d.csv", "--target", "nope"]) == 1
    assert main(["learn-cg", "--data", "d.csv", "--ridge", "--out", "p.pat"]) == 0


def test_usage_errors(workdir, capsys):
    assert main(["learn-cg", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err
    assert main([]) == 1
    assert main(["learn-cg", "--out", "x.pat"]) == 1
    assert main(["learn-cg", "--data", "missing.csv", "--out", "x.pat"]) == 1
    (workdir / "g.cg").write_text("p=2\n0 -> 1\n")
    (workdir / "d.csv").write_text("a,b\n1,2\n")
    assert main(["learn-cg", "--graph", "g.cg", "--data", "d.csv", "--out", "x.pat"]) == 1
    assert main(["learn-cg", "--graph", "g.cg", "--oracle", "--out", "no/such/dir/x.pat"]) == 1


def test_data_errors(workdir, capsys):
    (workdir / "bad.csv").write_text("a,b\n1,x\n")
    assert main(["learn-cg", "--data", "bad.csv", "--out", "x.pat"]) == 2
    assert "non-numeric" in capsys.readouterr().err
    (workdir / "cyc.cg").write_text("p=3\n0 -> 1\n1 -> 2\n0 -- 2\n")
    assert main(["learn-cg", "--graph", "cyc.cg", "--oracle", "--out", "x.pat"]) == 2
    (workdir / "grid.cfg").write_text("reps=0\n")
    assert main(["benchmark", "--grid", "grid.cfg", "--out", "b.csv"]) == 2


def test_help_per_subcommand(capsys):
    for sub in ("generate", "learn-mb", "learn-cg", "evaluate", "benchmark"):
        assert main([sub, "--help"]) == 0
        assert "usage: cglearn " + sub in capsys.readouterr().out


def test_benchmark(workdir):
    (workdir / "grid.cfg").write_text("p=8\nN=2\nreps=2\nalgo=gs\noracle=true\ntiming=false\n")
    argv = ["benchmark", "--grid", "grid.cfg", "--out", "b.csv", "--summary", "s.csv", "--workers", "2"]
    assert main(argv) == 0
    first = (workdir / "b.csv").read_bytes()
    rows = _csv_body((workdir / "b.csv").read_text())
    assert rows[0][:3] == ["p", "N", "n"] and len(rows) == 3
    assert all(r[11] == "0" for r in rows[1:])
    assert (workdir / "s.csv").read_text().startswith("# cglearn")
    assert main(argv) == 0
    assert (workdir / "b.csv").read_bytes() == first
