import json

import numpy as np
import pytest
from src.main import *
from src.measures import DiscreteMeasure, save_csv


def _beta(output):
    line = next(l for l in output.splitlines() if l.startswith("beta = "))
    return float(line.split()[2])


def test_sample_command(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert main(["sample", "--n", "50", "--seed", "3", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "x1,x2"
    assert len(lines) == 51
    assert f"wrote {out}" in capsys.readouterr().out


def test_sample_quadrature(tmp_path):
    out = tmp_path / "q.csv"
    assert main(["sample", "--shape", "square", "--quadrature", "0.05", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "x1,x2,weight,m11,m12,m21,m22"


def test_flatnorm_command(tmp_path, capsys):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    save_csv(DiscreteMeasure([[0.0, 0.0]], [1.0]), first)
    save_csv(DiscreteMeasure([[0.3, 0.0]], [1.0]), second)
    assert main(["flatnorm", str(first), str(second), "--out", str(tmp_path / "w")]) == 0
    assert _beta(capsys.readouterr().out) == pytest.approx(0.3)
    assert (tmp_path / "w" / "witness.csv").read_text().splitlines()[0] == "f"
    assert (tmp_path / "w" / "plan.csv").exists()
    assert main(["flatnorm", str(first), str(second), "--ball", "20,20,1"]) == 0
    assert _beta(capsys.readouterr().out) == pytest.approx(0.0, abs=1e-12)


def test_exit_codes(tmp_path, capsys):
    assert main(["rate", "--n-grid", "400,200"]) == 2
    assert "Error:" in capsys.readouterr().err
    assert main(["sample", "--shape", "torus", "--out", str(tmp_path / "t.csv")]) == 2
    assert main(["flatnorm", str(tmp_path / "none.csv"), str(tmp_path / "none.csv")]) == 1
    with pytest.raises(SystemExit):
        main(["variance"])


def test_experiment_config_precedence(tmp_path):
    path = tmp_path / "cfg.toml"
    path.write_text('shape = "square"\nn-grid = [100, 200]\ntrials = 5\n')
    args = build_parser().parse_args(["fluct", "--config", str(path), "--trials", "3", "--point", "0.5,0"])
    cfg = experiment_config(args)
    assert cfg.shape == "square"
    assert cfg.n_grid == (100, 200)
    assert cfg.trials == 3
    assert cfg.point == (0.5, 0.0)


def test_fluct_run_and_rerun_from_summary(tmp_path, capsys):
    first = tmp_path / "first"
    argv = ["fluct", "--n-grid", "100,200", "--trials", "3", "--delta", "0.3", "--bootstrap", "0", "--quiet"]
    assert main(argv + ["--out", str(first)]) == 0
    output = capsys.readouterr().out
    assert "slope:" in output
    assert "results written to" in output
    second = tmp_path / "second"
    assert main(["fluct", "--config", str(first / "summary.json"), "--trials", "4", "--quiet",
                 "--out", str(second)]) == 0
    assert len((second / "trials.csv").read_text().splitlines()) == 1 + 2 * 4
    summary = json.loads((second / "summary.json").read_text())
    assert summary["config"]["trials"] == 4
    assert summary["config"]["delta"] == 0.3


def test_quiet_comes_from_config_unless_flagged(tmp_path):
    path = tmp_path / "cfg.toml"
    path.write_text("quiet = true\n")
    assert experiment_config(build_parser().parse_args(["rate", "--config", str(path)])).quiet is True
    path.write_text("quiet = false\n")
    assert experiment_config(build_parser().parse_args(["rate", "--config", str(path), "--quiet"])).quiet is True
    assert experiment_config(build_parser().parse_args(["rate"])).quiet is False


def test_flatnorm_witness_needs_the_exact_solver(tmp_path, capsys):
    rng = np.random.default_rng(2)
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    save_csv(DiscreteMeasure(rng.random((400, 2)), rng.random(400) / 400), first)
    save_csv(DiscreteMeasure(rng.random((400, 2)), rng.random(400) / 400), second)
    assert main(["flatnorm", str(first), str(second), "--out", str(tmp_path / "w")]) == 0
    assert "exact=True" in capsys.readouterr().out
    assert (tmp_path / "w" / "witness.csv").exists()
    assert main(["flatnorm", str(first), str(second), "--solver", "sparse", "--out", str(tmp_path / "s")]) == 0
    output = capsys.readouterr().out
    assert "exact=False" in output
    assert "no witness from the sparse solver" in output
    assert not (tmp_path / "s").exists()


def test_density_command(capsys):
    argv = ["density", "--n-grid", "100,200", "--trials", "2", "--bootstrap", "0", "--quiet", "--point", "1,0"]
    assert main(argv) == 0
    output = capsys.readouterr().out
    assert output.splitlines()[0].startswith("density experiment on circle")
    assert "slope:" in output
