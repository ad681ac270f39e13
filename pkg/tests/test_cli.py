import json
import subprocess
import sys

import pytest

from unitising.circuit import SELECTOR
from unitising.cli import main
from unitising.core import IsingModel, dumps_model, loads_model
from unitising.library import published_model


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, "--json", *argv)
    records = [json.loads(line) for line in out.splitlines()]
    assert records[-1]["kind"] == "manifest"
    return code, records[:-1], records[-1]


@pytest.fixture
def and_file(tmp_path):
    path = tmp_path / "and.ising"
    path.write_text(dumps_model(published_model("AND", "plain")[0]))
    return str(path)


def test_synth_writes_model(capsys, tmp_path):
    out_file = tmp_path / "m.ising"
    code, out, err = run(capsys, "synth", "--gate", "AND", "--ancillas", "1", "--bound", "1",
                         "--out", str(out_file))
    assert code == 0
    assert "(1, 0, 5)" in out and "mu=-3" in out
    assert loads_model(out_file.read_text()).is_unit()
    assert '"subcommand": "synth"' in err


def test_synth_infeasible(capsys):
    code, records, manifest = run_json(capsys, "synth", "--gate", "XOR", "--bound", "3")
    assert code == 0 and records == [{"kind": "synth", "gate": "XOR", "feasible": False,
                                      "bound": 3}]
    assert manifest["outcome"] == "infeasible"


def test_synth_from_spec_file_with_priority(capsys, tmp_path):
    spec = tmp_path / "and.spec"
    spec.write_text("inputs a b\noutputs x\nrow -1 -1 -1\nrow -1 1 -1\nrow 1 -1 -1\nrow 1 1 1\n")
    code, records, _ = run_json(capsys, "synth", "--spec", str(spec), "--ancillas", "1",
                                "--priority", "MAX_ABS>QUAD_NUM>INPUT_NUM")
    assert code == 0 and (records[0]["input_num"], records[0]["quad_num"]) == (1, 4)


def test_verify(capsys, and_file, tmp_path):
    code, out, _ = run(capsys, "verify", "--model", and_file, "--gate", "AND")
    assert code == 0 and out.startswith("PASS mu=-3")
    code, out, err = run(capsys, "verify", "--model", and_file, "--gate", "OR")
    assert code == 1 and out.startswith("FAIL") and "error:" in err


def test_solve_exact(capsys, and_file):
    code, out, _ = run(capsys, "solve", "--model", and_file, "--clamp", "a=1", "--clamp", "b=1",
                       "--exact")
    assert code == 0
    assert "min energy -3" in out and "x=+1" in out


def test_solve_annealer_json(capsys, and_file):
    code, records, manifest = run_json(capsys, "solve", "--model", and_file, "--clamp", "a=1",
                                       "--clamp", "b=-1", "--sa", "--seed", "4",
                                       "--target", "-3")
    assert code == 0
    assert records[0]["certified"] and records[0]["assignment"]["x"] == -1
    assert manifest["seed"] == 4
    assert list(records[0]) == ["kind", "best_energy", "certified", "restarts_used",
                                "flips_attempted", "assignment"]


def test_compile_writes_model_and_map(capsys, tmp_path):
    net = tmp_path / "sel.net"
    net.write_text(SELECTOR)
    model = tmp_path / "sel.ising"
    code, out, _ = run(capsys, "compile", "--netlist", str(net), "--out", str(model))
    assert code == 0
    m = loads_model(model.read_text())
    lines = (tmp_path / "sel.ising.map").read_text().splitlines()
    names = {ln.split()[1]: ln.split()[2] for ln in lines}
    assert set(names) == {"a", "s", "b", "x"} and all(v in m for v in names.values())


def test_multiply_and_factor(capsys):
    code, out, _ = run(capsys, "multiply", "--bits", "4", "--x", "13", "--y", "11")
    assert code == 0 and "= 143" in out
    code, out, _ = run(capsys, "factor", "--bits", "4", "--s", "143", "--seed", "7")
    assert code == 0 and out.splitlines() == ["11 x 13", "certified"]
    code, records, _ = run_json(capsys, "factor", "--bits", "3", "--s", "35", "--exact")
    assert [(r["x"], r["y"]) for r in records] == [(5, 7)]


def test_stats(capsys):
    code, records, _ = run_json(capsys, "stats", "--bits", "4")
    assert code == 0
    r = records[0]
    assert (r["and_gates"], r["half_adders"], r["full_adders"], r["max_abs"]) == (9, 4, 8, 1)


def test_convert_round_trip(capsys, tmp_path, and_file):
    qubo = tmp_path / "and.qubo"
    assert run(capsys, "convert", "--model", and_file, "--out", str(qubo))[0] == 0
    assert qubo.read_text().startswith("format qubo")
    back = tmp_path / "back.ising"
    assert run(capsys, "convert", "--model", str(qubo), "--out", str(back))[0] == 0
    m = published_model("AND", "plain")[0]
    assert loads_model(back.read_text()) == IsingModel(
        {v: 4 * c for v, c in m.linear.items()}, {p: 4 * c for p, c in m.quadratic.items()})


def test_domain_errors_exit_one(capsys, tmp_path, and_file):
    code, _, err = run(capsys, "factor", "--bits", "3", "--s", "63", "--exact")
    assert code == 1 and "no input produces" in err
    code, _, err = run(capsys, "solve", "--model", str(tmp_path / "missing.ising"))
    assert code == 1 and "cannot read" in err
    code, _, err = run(capsys, "solve", "--model", and_file, "--clamp", "q=1")
    assert code == 1 and "unknown variable 'q'" in err
    code, _, err = run(capsys, "multiply", "--bits", "3", "--x", "4", "--y", "3")
    assert code == 1 and "even" in err


@pytest.mark.parametrize("argv, flag", [
    (["solve", "--model", "m", "--clamp", "a=2"], "--clamp"),
    (["synth", "--gate", "AND", "--bound", "x"], "--bound"),
    (["factor", "--bits", "4"], "--s"),
    (["--json", "factor", "--bits", "4", "--s", "143"], "--seed"),
    (["nonsense"], "invalid choice"),
])
def test_usage_errors_exit_two(capsys, argv, flag):
    with pytest.raises(SystemExit) as e:
        main(argv)
    assert e.value.code == 2
    assert flag in capsys.readouterr().err


def test_manifest_reproduces_run(capsys):
    _, records, manifest = run_json(capsys, "factor", "--bits", "4", "--s", "143", "--seed", "7")
    args = manifest["arguments"]
    argv = ["--json", args["command"], "--bits", str(args["bits"]), "--s", str(args["s"]),
            "--seed", str(args["seed"]), "--restarts", str(args["restarts"])]
    _, again, manifest2 = run_json(capsys, *argv[1:])
    assert again == records and manifest2["outcome"] == manifest["outcome"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "unitising.cli", "stats", "--bits", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "AND=4" in proc.stdout
