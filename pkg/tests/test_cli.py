import json
import subprocess
import sys

import numpy as np
import pytest

from camu.cli import main
from camu.spacetime import read_pgm
from camu.zoo import serialize_rule, eca


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_help_lists_subcommands():
    res = subprocess.run([sys.executable, "-m", "camu", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for name in ("ratio", "cesaro", "entropy", "periodic", "classify", "spacetime", "demo-fs"):
        assert name in res.stdout


@pytest.mark.parametrize("argv", [
    ["ratio", "--rule", "fs", "--measure", "bernoulli:3:0.2,0.3,0.5", "--m", "1", "--n", "2",
     "--T", "5", "--bogus"],
    ["ratio", "--rule", "nope", "--measure", "bernoulli:2:0.5,0.5", "--m", "1", "--n", "2",
     "--T", "5"],
    ["ratio", "--rule", "fs", "--measure", "bernoulli:2:0.5,0.5", "--m", "1", "--n", "2",
     "--T", "5"],
    ["ratio", "--rule", "fs", "--measure", "bernoulli:3:0.2,0.3", "--m", "1", "--n", "2",
     "--T", "5"],
    ["ratio", "--rule", "fs", "--measure", "bernoulli:3:0.2,0.3,0.5", "--m", "3", "--n", "2",
     "--T", "5"],
    ["entropy", "--rule", "fs", "--measure", "bernoulli:3:0.2,0.3,0.5", "--p", "0", "--T", "0"],
    ["demo-fs", "--p0", "0.5", "--p1", "0.5", "--p2", "0.5"],
])
def test_bad_arguments_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_ratio_identity_all_one(capsys):
    code, out, _ = run(["ratio", "--rule", "identity:3", "--measure", "bernoulli:3:1/3,1/3,1/3",
                        "--m", "2", "--n", "5", "--T", "50", "--samples", "1000", "--seed", "7"],
                       capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x_id,m,n,T,samples,estimate,wilson_lo,wilson_hi"
    assert float(lines[1].split(",")[5]) == 1.0


def test_ratio_fs_grid_increasing(capsys):
    code, out, _ = run(["ratio", "--rule", "fs", "--measure", "bernoulli:3:0.2,0.3,0.5",
                        "--m", "1", "--n", "2", "--n", "5", "--n", "20", "--T", "100",
                        "--samples", "2000", "--seed", "7", "--x-count", "8"], capsys)
    assert code == 0
    rows = [ln.split(",") for ln in out.splitlines()[1:]]
    by_n = {}
    for r in rows:
        by_n.setdefault(int(r[2]), []).append(float(r[5]))
    means = [np.mean(by_n[n]) for n in (2, 5, 20)]
    assert means[0] < means[1] < means[2]


def test_cesaro_word_and_L(tmp_path, capsys):
    code, out, err = run(["cesaro", "--rule", "fs", "--measure", "bernoulli:3:0.2,0.3,0.5",
                          "--word", "1", "--n", "50", "--samples", "2000", "--seed", "7"], capsys)
    assert code == 0 and "trend" in err
    lines = out.splitlines()
    assert lines[0] == "t,value,cesaro" and len(lines) == 51
    path = tmp_path / "emp.txt"
    code, _, _ = run(["cesaro", "--rule", "fs", "--measure", "bernoulli:3:0.2,0.3,0.5", "--L", "2",
                      "--n", "10", "--samples", "500", "--out", str(path)], capsys)
    assert code == 0 and path.read_text().startswith("# rule=fs")


def test_entropy_shift(capsys):
    code, out, err = run(["entropy", "--rule", "shift:2", "--measure", "bernoulli:2:0.5,0.5",
                          "--p", "0", "--T", "8", "--samples", "20000", "--seed", "7"], capsys)
    assert code == 0
    last = out.splitlines()[-1].split(",")
    assert abs(float(last[4]) - np.log(2)) < 0.05
    assert "nats" in err


def test_periodic_and_density(tmp_path, capsys):
    code, out, _ = run(["periodic", "--rule", "fs", "--Lmax", "4"], capsys)
    assert code == 0
    rows = {tuple(ln.split(",")) for ln in out.splitlines()[1:]}
    assert ("4", "0002", "0", "1") in rows and ("2", "02", "0", "1") in rows
    emp = tmp_path / "emp.txt"
    run(["cesaro", "--rule", "fs", "--measure", "bernoulli:3:0.2,0.3,0.5", "--L", "3",
         "--n", "300", "--samples", "300", "--out", str(emp)], capsys)
    code, out, err = run(["periodic", "--rule", "fs", "--Lmax", "5", "--density", str(emp)], capsys)
    assert code == 0 and out.startswith("# coverage=") and "coverage" in err


def test_classify_json(capsys):
    code, out, _ = run(["classify", "--rule", "identity:2", "--measure", "bernoulli:2:0.5,0.5",
                        "--m", "1", "--n", "2", "--n", "4", "--T", "5", "--samples", "100",
                        "--x-count", "2"], capsys)
    assert code == 0
    assert json.loads(out)["label"] == "equicontinuous-like"


def test_rule_file_and_markov_file(tmp_path, capsys):
    rule = tmp_path / "r110.txt"
    rule.write_text(serialize_rule(eca(110)))
    chain = tmp_path / "chain.txt"
    chain.write_text("markov 2\n0.9 0.1\n0.2 0.8\n")
    code, out, _ = run(["ratio", "--rule", str(rule), "--measure", f"markov:2:{chain}",
                        "--m", "1", "--n", "3", "--T", "5", "--samples", "200"], capsys)
    assert code == 0 and len(out.splitlines()) == 2


def test_spacetime_outputs(tmp_path, capsys):
    path = tmp_path / "d.pgm"
    cells = "0" * 10 + "1" + "0" * 30
    code, _, _ = run(["spacetime", "--rule", "fs", "--cells", cells, "--steps", "20",
                      "--mode", "torus", "--out", str(path)], capsys)
    assert code == 0
    img = read_pgm(path.read_bytes())
    assert img.shape == (21, 41)
    assert [np.nonzero(img[t] == 127)[0].tolist() for t in range(21)] == [
        [(10 - t) % 41] for t in range(21)]
    code, _, _ = run(["spacetime", "--rule", "fs", "--cells", "0" * 20 + "2" + "0" * 20,
                      "--steps", "20", "--out", str(path)], capsys)
    img = read_pgm(path.read_bytes())
    assert all(np.nonzero(img[t] == 254)[0].tolist() == [20] for t in range(21))
    code, _, _ = run(["spacetime", "--rule", "eca:110", "--random", "bernoulli:2:0.5,0.5",
                      "--width", "64", "--steps", "30", "--mode", "torus", "--out", str(path)],
                     capsys)
    assert code == 0 and read_pgm(path.read_bytes()).shape == (31, 64)


def test_spacetime_unwritable(tmp_path, capsys):
    code, _, err = run(["spacetime", "--rule", "fs", "--cells", "0120", "--steps", "1",
                        "--out", str(tmp_path / "missing" / "d.pgm")], capsys)
    assert code == 1 and "error" in err


@pytest.mark.parametrize("argv", [
    ["ratio", "--rule", "fs", "--measure", "bernoulli:3:0.2,0.3,0.5", "--m", "1", "--n", "2",
     "--n", "6", "--T", "30", "--samples", "5000", "--x-count", "2", "--seed", "3"],
    ["cesaro", "--rule", "fs", "--measure", "bernoulli:3:0.2,0.3,0.5", "--word", "1", "--n", "40",
     "--samples", "5000", "--seed", "3"],
    ["entropy", "--rule", "eca:30", "--measure", "bernoulli:2:0.5,0.5", "--p", "1", "--T", "6",
     "--samples", "5000", "--seed", "3"],
])
def test_threads_do_not_change_output(argv, capsys):
    _, one, _ = run(argv + ["--threads", "1"], capsys)
    _, eight, _ = run(argv + ["--threads", "8"], capsys)
    assert one == eight


def test_demo_unfavourable_not_confirmed(capsys):
    code, out, _ = run(["demo-fs", "--p0", "0.2", "--p1", "0.5", "--p2", "0.3", "--samples", "200",
                        "--ref-points", "3"], capsys)
    line = [ln for ln in out.splitlines() if ln.startswith("ratio trend")][0]
    assert "NOT CONFIRMED" in line
    assert "PASS" not in line
