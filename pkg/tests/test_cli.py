import csv
import json
import subprocess
import sys

import pytest

from dtl.cli import EXPERIMENTS, build_parser, run

SMALL = {
    "optimality": ["--n", "40", "--queries", "50", "--alternatives", "2"],
    "scaling": ["--sizes", "50,100", "--queries", "30"],
    "consistency": ["--sizes", "30,60", "--test-size", "100"],
    "risk": ["--n", "100", "--test-size", "100"],
    "adaptivity": ["--sizes", "30,60", "--test-size", "100"],
    "interperror": ["--sizes", "30,60", "--test-size", "100"],
}


def col(path, name):
    with open(path, newline="") as fh:
        return [r[name] for r in csv.DictReader(fh)]


def test_fit_predict_reproduces_responses(tmp_path):
    d, m, p = tmp_path / "d.csv", tmp_path / "m.json", tmp_path / "p.csv"
    assert run(["generate", "--kind", "saddle", "--n", "100", "--noise", "0", "--seed", "7",
                "--out", str(d)]) == 0
    assert run(["fit", "--data", str(d), "--lambda", "0", "--loss", "squared",
                "--out", str(m)]) == 0
    assert run(["predict", "--model", str(m), "--queries", str(d), "--out", str(p)]) == 0
    assert col(p, "y") == col(d, "y")
    assert col(p, "x1") == col(d, "x1")


def test_generate_is_deterministic(tmp_path):
    args = ["generate", "--kind", "saddle", "--n", "100", "--noise", "0", "--seed", "7"]
    run(args + ["--out", str(tmp_path / "a.csv")])
    run(args + ["--out", str(tmp_path / "b.csv")])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_optimality_experiment_report(tmp_path):
    out = tmp_path / "r.json"
    assert run(["experiment", "--name", "optimality", "--p", "2", "--n", "200",
                "--queries", "500", "--seed", "1", "--out", str(out)]) == 0
    r = json.loads(out.read_text())
    assert r["pointwise_violations"] == 0
    assert r["comparisons"] == 500 * 20
    assert (tmp_path / "r.csv").exists()


@pytest.mark.parametrize("name", EXPERIMENTS)
def test_every_experiment_runs(tmp_path, name):
    out = tmp_path / f"{name}.json"
    assert run(["experiment", "--name", name, "--seed", "2", "--out", str(out)] + SMALL[name]) == 0
    r = json.loads(out.read_text())
    assert r["experiment"] == name and r["config"]["seed"] == 2
    man = json.loads((tmp_path / f"{name}.json.manifest.json").read_text())
    assert man["seed"] == 2 and set(man["versions"]) >= {"dtl", "numpy", "scipy", "python"}
    assert "time" not in json.dumps(man).lower()
    assert len(col(tmp_path / f"{name}.csv", list(csv.DictReader(
        open(tmp_path / f"{name}.csv")).fieldnames)[0])) >= 1


def test_manifest_beside_every_output(tmp_path):
    d, m = tmp_path / "d.csv", tmp_path / "m.json"
    run(["generate", "--kind", "moons", "--n", "60", "--out", str(d)])
    run(["fit", "--data", str(d), "--lambda", "0.1", "--max-iters", "20", "--out", str(m)])
    run(["export-mesh", "--model", str(m), "--out", str(tmp_path / "s.off")])
    run(["export-mesh", "--model", str(m), "--format", "json", "--what", "triangulation",
         "--out", str(tmp_path / "t.json")])
    for name in ("d.csv", "m.json", "s.off", "t.json"):
        man = json.loads((tmp_path / f"{name}.manifest.json").read_text())
        assert man["output"] == name
    cfg = json.loads((tmp_path / "m.json.manifest.json").read_text())["config"]
    assert cfg["lam"] == 0.1 and cfg["beta1"] == 0.9 and cfg["max_iters"] == 20


@pytest.mark.parametrize("argv", [
    [],
    ["fit"],
    ["fit", "--data", "x.csv"],
    ["fit", "--data", "x.csv", "--out", "m.json", "--loss", "hinge"],
    ["frobnicate"],
    ["generate", "--kind", "saddle", "--n", "ten", "--out", "d.csv"],
    ["experiment", "--name", "scaling", "--flip", "0.2", "--out", "r.json"],
    ["experiment", "--name", "scaling", "--sizes", "1,a", "--out", "r.json"],
    ["fit", "--dat", "x.csv", "--out", "m.json"],
])
def test_usage_errors_exit_1(argv, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(argv) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_data_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("x1,x2,y\n0,NaN,1\n")
    assert run(["fit", "--data", str(bad), "--out", str(tmp_path / "m.json")]) == 2
    err = capsys.readouterr().err
    assert err.startswith("error:") and "row 2" in err
    assert run(["fit", "--data", str(tmp_path / "missing.csv"),
                "--out", str(tmp_path / "m.json")]) == 2
    assert run(["predict", "--model", str(bad), "--queries", str(bad),
                "--out", str(tmp_path / "p.csv")]) == 2
    dup = tmp_path / "dup.csv"
    dup.write_text("x1,x2,y\n0,0,1\n1,0,1\n0,1,1\n0,0,2\n")
    assert run(["fit", "--data", str(dup), "--out", str(tmp_path / "m.json")]) == 2


def test_surface_off_for_p3_exit_2(tmp_path):
    d, m = tmp_path / "d.csv", tmp_path / "m.json"
    rows = ["x1,x2,x3,y"] + [f"{i % 3},{(i // 3) % 3},{i // 9},{i}" for i in range(27)]
    d.write_text("\n".join(rows) + "\n")
    assert run(["fit", "--data", str(d), "--out", str(m)]) == 0
    assert run(["export-mesh", "--model", str(m), "--out", str(tmp_path / "s.off")]) == 2
    assert run(["export-mesh", "--model", str(m), "--what", "triangulation",
                "--out", str(tmp_path / "t.off")]) == 0


@pytest.mark.parametrize("cmd", ["fit", "predict", "generate", "export-mesh", "experiment"])
def test_help_documents_defaults(cmd, capsys):
    assert run([cmd, "--help"]) == 0
    out = capsys.readouterr().out
    assert "default" in out
    if cmd == "fit":
        for token in ("0.9", "0.999", "1e-08", "--lambda", "--loss", "--step", "--eta",
                      "--max-iters", "--seed"):
            assert token in out
    if cmd == "experiment":
        for name in EXPERIMENTS:
            assert name in out


def test_long_flags_only():
    for action in build_parser()._subparsers._group_actions[0].choices["fit"]._actions:
        assert all(o.startswith("--") or o == "-h" for o in action.option_strings)


def test_console_script_exit_codes(tmp_path):
    exe = [sys.executable, "-m", "dtl.cli"]
    r = subprocess.run(exe + ["fit"], capture_output=True, text=True)
    assert r.returncode == 1 and r.stderr.startswith("error:")
    r = subprocess.run(exe + ["fit", "--data", str(tmp_path / "no.csv"), "--out",
                              str(tmp_path / "m.json")], capture_output=True, text=True)
    assert r.returncode == 2 and r.stderr.startswith("error:")
