import csv
import json
import subprocess
import sys

import pytest

from divlab import cli
from divlab.cli import EXIT_CONFIG, EXIT_OK, EXIT_REFUTED, SCHEMA


def run_json(tmp_path, *argv, name="out.json"):
    path = tmp_path / name
    code = cli.main([*argv, "--json", str(path)])
    return code, json.loads(path.read_text())


def test_density_square_map_half_alpha(tmp_path):
    code, rep = run_json(tmp_path, "density", "--map", "power:2", "--alpha", "0.5", "--horizon", "1000000")
    assert code == EXIT_OK and rep["schema"] == SCHEMA
    assert rep["estimate"]["kind"] == "finite"
    assert abs(rep["estimate"]["value"] - 1.0) <= 0.05


def test_density_square_map_full_alpha(tmp_path):
    code, rep = run_json(tmp_path, "density", "--map", "power:2", "--alpha", "1.0", "--horizon", "1000000")
    assert code == EXIT_OK
    assert abs(rep["estimate"]["value"]) <= 0.05


def test_density_csv_columns(tmp_path):
    out = tmp_path / "ratios.csv"
    assert cli.main(["density", "--map", "affine:2,0", "--horizon", "5000", "--csv", str(out)]) == EXIT_OK
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["n", "ratio"]
    assert len(rows) > 2 and all(len(r) == 2 for r in rows)


@pytest.mark.parametrize("argv", [
    ["density", "--map", "nosuchmap:3", "--horizon", "100"],
    ["density", "--map", "power:2", "--alpha", "1.5", "--horizon", "100"],
    ["density", "--map", "power:2", "--horizon", "0"],
    ["game", "--space", "hilbert", "--p1", "whole", "--p2", "least"],
    ["game", "--space", "discreteN", "--p1", "whole", "--p2", "telepathic"],
    ["transform", "--name", "nowhere-separable", "--space", "discreteN"],
    ["frobnicate"],
])
def test_config_errors_exit_two(argv, capsys):
    assert cli.main(argv) == EXIT_CONFIG


def test_config_error_reports_json_on_stderr(capsys):
    cli.main(["density", "--map", "nosuchmap:3", "--horizon", "100"])
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["schema"] == SCHEMA and "error" in err


def test_experiment_config_validation():
    with pytest.raises(cli.ConfigError):
        cli.ExperimentConfig("density", {"alpha": 1.0, "horizon": 10}).validate()
    with pytest.raises(cli.ConfigError):
        cli.ExperimentConfig("bogus", {}).validate()


def test_game_reports(tmp_path):
    code, rep = run_json(tmp_path, "game", "--space", "discreteN", "--p1", "whole", "--p2", "nth:0",
                         "--horizon", "20")
    assert code == EXIT_OK and rep["transcript"]["result"]["verdict"] == "P2_certified"
    code, rep = run_json(tmp_path, "game", "--space", "rationals", "--p1", "pi-base", "--p2", "seeded",
                         "--horizon", "30", name="q.json")
    assert code == EXIT_REFUTED and rep["transcript"]["result"]["verdict"] == "P1_certified"


def test_converge_pair(tmp_path):
    code, _ = run_json(tmp_path, "converge", "--seq", "squares-exception", "--horizon", "100000")
    assert code == EXIT_OK
    code, _ = run_json(tmp_path, "converge", "--seq", "swapped", "--horizon", "100000", name="s.json")
    assert code == EXIT_REFUTED


@pytest.mark.parametrize("name,space", [("g1-from-gfin", "discreteN"), ("injectivize", "rationals"),
                                        ("pfin-lift", "zprod"), ("divergence-lift", "zprod"),
                                        ("nowhere-separable", "zprod")])
def test_transforms_sound(tmp_path, name, space):
    code, rep = run_json(tmp_path, "transform", "--name", name, "--space", space, "--horizon", "20")
    assert code == EXIT_OK and rep["validation"] == "sound"


def test_horizon_cap(tmp_path, monkeypatch):
    monkeypatch.setenv("DIVLAB_HORIZON_CAP", "7")
    code, rep = run_json(tmp_path, "game", "--space", "discreteN", "--p1", "whole", "--p2", "least",
                         "--horizon", "500")
    assert len(rep["transcript"]["rounds"]) == 7
    assert cli.horizon_cap(3) == 3


def test_reports_byte_identical(tmp_path):
    argv = ["game", "--space", "zprod", "--p1", "cylinders", "--p2", "zk-markov", "--horizon", "25", "--seed", "5"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    cli.main([*argv, "--json", str(a)])
    cli.main([*argv, "--json", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_seeded_streams_are_independent_and_stable():
    assert cli.seeded(3, "x").random() == cli.seeded(3, "x").random()
    assert cli.seeded(3, "x").random() != cli.seeded(3, "y").random()


def test_reproduce_all(capsys):
    assert cli.main(["reproduce-all"]) == EXIT_OK
    lines = [l for l in capsys.readouterr().out.splitlines() if l.strip()]
    assert len(lines) == len(cli.EXAMPLES)
    assert all(l.startswith("PASS") for l in lines)
    anchors = [e.anchor for e in cli.EXAMPLES]
    assert len(set(anchors)) == len(anchors)
    assert "s statistically converges to 0" in anchors  # the original sequence
    assert "δ({n ∈ ℕ : s∘φ(n) ∉ (−1,1)}) = 1" in anchors  # its square swap
    assert any("cofinite" in a for a in anchors)
    assert "x ∈ cl_X{y_n : n ∈ ℕ}" in anchors  # the pi-base attack


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "divlab", "density", "--map", "identity", "--horizon", "1000"],
                       capture_output=True, text=True)
    assert r.returncode == EXIT_OK
    assert json.loads(r.stdout)["schema"] == SCHEMA
