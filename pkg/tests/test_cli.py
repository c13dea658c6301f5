"""Command-line harness end to end on temporary files."""

import csv
import json

import pytest

from facloc.cli import main
from facloc.metric import Configuration, read_instance, total_cost


@pytest.fixture()
def figure2_file(tmp_path):
    path = tmp_path / "figure2.json"
    assert main(["gen", "--kind", "figure2", "--n", "2", "-o", str(path)]) == 0
    return path


def test_gen_writes_valid_instance(figure2_file):
    inst = read_instance(str(figure2_file))
    assert inst.n == 2 and inst.open_cost.tolist() == [1.0, 99.0]


def test_solve_subcommand(figure2_file, tmp_path):
    out = tmp_path / "result.json"
    assert main(["solve", "--instance", str(figure2_file), "--seed", "1",
                 "-o", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["open"] == [0]
    assert data["cost"] == pytest.approx(2.0)
    # Emitted results re-validate against the instance.
    inst = read_instance(str(figure2_file))
    config = Configuration.from_open(inst, data["open"])
    assert total_cost(inst, config) == pytest.approx(data["cost"])
    assert data["audit"]["ok"] is True


def test_baseline_subcommand(tmp_path):
    inst_path = tmp_path / "i3.json"
    main(["gen", "--kind", "euclidean", "--n", "3", "--seed", "4", "-o", str(inst_path)])
    out = tmp_path / "base.json"
    assert main(["baseline", "--instance", str(inst_path), "--opt", "--mp",
                 "-o", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["opt"]["enumerated"] == 7
    assert data["mp"]["cost"] >= data["opt"]["cost"] - 1e-12


def test_ruling_set_subcommand(tmp_path):
    out = tmp_path / "ruling.json"
    assert main(["ruling-set", "--n", "64", "--p", "0.15", "--graph-seed", "3",
                 "--seed", "5", "-o", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["verified"] is True
    assert set(data) >= {"result", "iterations", "per_iteration",
                         "thresholds_crossed", "rounds"}


def test_bench_subcommand(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--n", "8,10", "--seeds", "2", "-o", str(out)]) == 0
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    assert set(rows[0]) == {"n", "seed", "rounds", "rs_iterations", "cost",
                            "sum_rbar", "cost_over_sum_rbar", "mp_cost", "opt_cost"}
    for row in rows:
        assert float(row["cost"]) >= float(row["opt_cost"]) - 1e-9
        assert float(row["cost_over_sum_rbar"]) <= 36.69


def test_bench_rows_are_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["bench", "--n", "8", "--seeds", "3", "-o", str(a)])
    main(["bench", "--n", "8", "--seeds", "3", "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_radii_subcommand(figure2_file, tmp_path):
    out = tmp_path / "radii.json"
    assert main(["radii", "--instance", str(figure2_file), "-o", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["r"] == [1.0, 50.0]
    assert data["rbar"] == [1.0, 2.0]
    assert data["class_of"] == [0, 7]


def test_errors_exit_nonzero(tmp_path, capsys):
    assert main(["solve", "--instance", str(tmp_path / "missing.json")]) == 2
    assert "error:" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 2, "f": [1, 1], "d": [[0, 1], [2, 0]]}))
    assert main(["solve", "--instance", str(bad)]) == 2


def test_accept_single_criterion():
    assert main(["accept", "--criteria", "1"]) == 0
