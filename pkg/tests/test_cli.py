# tests/test_cli.py

import json
from pathlib import Path

import pytest

from hypercut.cli import main
from hypercut.hypergraph import parse_hmetis
from hypercut.pbo import BinaryPolynomial, IsingModel, evaluate, evaluate_all

DATA_DIR = Path(__file__).parent / "data"
SMALL = str(DATA_DIR / "small.hgr")


def test_gen_writes_instances(tmp_path):
    out_dir = tmp_path / "instances"
    code = main(
        ["gen", "--n", "8", "--r", "3", "--avg-degree", "5", "--count", "4",
         "--seed", "7", "--out-dir", str(out_dir)]
    )
    assert code == 0
    files = sorted(out_dir.glob("*.hgr"))
    assert len(files) == 4
    for path in files:
        h = parse_hmetis(path.read_text(encoding="utf-8"))
        assert h.n == 8
        assert h.m == 13


def test_solve_exact_prints_feasible_result(capsys):
    code = main(["solve", "--input", SMALL, "--solver", "exact", "--cut", "aon", "--k", "2"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["feasible"] is True
    assert payload["cut_value"] == 2
    assert payload["labels"] == [0, 0, 1, 1]


def test_solve_sa_writes_output_file(tmp_path):
    out = tmp_path / "result.json"
    code = main(
        ["solve", "-i", SMALL, "--solver", "sa", "--reads", "5", "--sweeps", "50",
         "--seed", "3", "--lambda", "2", "-o", str(out)]
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["metadata"]["solver"] == "sa"
    assert len(payload["assignment"]) == 4


def test_solve_hrwc_uses_default_transitions(capsys):
    code = main(["solve", "-i", SMALL, "--solver", "exact", "--cut", "hrwc", "--k", "2"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["feasible"] is True
    assert len(payload["assignment"]) == 8  # one-hot layout


def test_solve_exact_oracle_only_cut(capsys):
    code = main(["solve", "-i", SMALL, "--solver", "exact", "--cut", "linear", "--k", "2"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["feasible"] is True
    assert payload["energy"] is None
    assert payload["cut_value"] == 2
    assert payload["labels"] == [0, 0, 1, 1]
    assert payload["metadata"]["solver"] == "exact"


def test_solve_ncut_multi_exact(capsys):
    assert main(["solve", "-i", SMALL, "--solver", "exact", "--cut", "ncut_multi", "--k", "2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["feasible"] is True
    assert payload["cut_value"] > 0


def test_solve_oracle_only_cut_rejects_heuristic_solvers():
    assert main(["solve", "-i", SMALL, "--solver", "sa", "--cut", "linear"]) == 2


def test_build_poly_and_ising(capsys):
    assert main(["build", "-i", SMALL, "--lambda", "1"]) == 0
    poly = BinaryPolynomial.from_text(capsys.readouterr().out)
    assert poly.num_vars == 4
    assert evaluate(poly, (0, 0, 1, 1)) == pytest.approx(2)

    assert main(["build", "-i", SMALL, "--lambda", "1", "--format", "ising"]) == 0
    ising = IsingModel.from_text(capsys.readouterr().out)
    assert ising.energy((-1, -1, 1, 1)) == pytest.approx(2)


def test_build_json(capsys):
    assert main(["build", "-i", SMALL, "--cut", "kminus1", "--k", "2", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["num_vars"] == 8
    assert payload["degree"] >= 2


def test_convert_between_formats(tmp_path, capsys):
    poly_path = tmp_path / "energy.poly"
    ising_path = tmp_path / "energy.ising"
    assert main(["build", "-i", SMALL, "-o", str(poly_path)]) == 0
    assert main(["convert", "-i", str(poly_path), "--to", "ising", "-o", str(ising_path)]) == 0
    assert main(["convert", "-i", str(ising_path), "--to", "poly"]) == 0
    back = BinaryPolynomial.from_text(capsys.readouterr().out)
    original = BinaryPolynomial.from_text(poly_path.read_text())
    assert evaluate_all(back) == pytest.approx(evaluate_all(original))


def test_convert_hubo_needs_quadratize(tmp_path):
    path = tmp_path / "cubic.poly"
    path.write_text("vars 3 maxdeg 3\n1.0 0 1 2\n")
    assert main(["convert", "-i", str(path), "--to", "ising"]) == 2
    assert main(["convert", "-i", str(path), "--to", "ising", "--quadratize",
                 "-o", str(tmp_path / "out.ising")]) == 0


def test_experiment_writes_csv(tmp_path):
    out = tmp_path / "report.csv"
    code = main(["experiment", "--config", str(DATA_DIR / "tiny_experiment.json"), "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == (
        "solver,lambda,n,feasibility_mean,feasibility_se,"
        "optimality_mean,optimality_se,mean_seconds"
    )
    assert len(lines) == 9


def test_missing_file_is_usage_error(tmp_path, capsys):
    code = main(["solve", "-i", str(tmp_path / "missing.hgr"), "--solver", "exact"])
    assert code == 1
    assert "usage" in capsys.readouterr().err


def test_unknown_flag_exits_with_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--frobnicate"])
    assert exc.value.code == 1


def test_malformed_instance_is_solver_error(tmp_path, capsys):
    path = tmp_path / "bad.hgr"
    path.write_text("1 3\n1 1 2\n")
    assert main(["solve", "-i", str(path), "--solver", "exact"]) == 2
    assert "line 2" in capsys.readouterr().err


def test_infeasible_k_is_solver_error(tmp_path):
    path = tmp_path / "pair.hgr"
    path.write_text("1 2\n1 2\n")
    assert main(["solve", "-i", str(path), "--solver", "exact", "--cut", "kminus1", "--k", "3"]) == 2
