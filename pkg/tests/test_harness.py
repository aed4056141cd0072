import json
import math
import pickle

import numpy as np
import pytest
from src.config import DEFAULT_SEED, load_config_file
from src.errors import ArgumentError, ExperimentError
from src.estimators import split_varifold_estimate
from src.geometry import shape_by_name
from src.harness import *
from src.metrics import FlatMetricProblem, flat_norm
from src.sampling import sample_split


def _tiny(**kwargs):
    base = dict(n_grid=(200, 400), trials=2, bootstrap=20, quiet=True, workers=1)
    base.update(kwargs)
    return ExperimentConfig(**base)


def test_config_validation():
    with pytest.raises(ArgumentError):
        ExperimentConfig(variant="X", workers=1)
    with pytest.raises(ArgumentError):
        ExperimentConfig(n_grid=(400, 200), workers=1)
    with pytest.raises(ArgumentError):
        ExperimentConfig(n_grid=(), workers=1)
    with pytest.raises(ArgumentError):
        ExperimentConfig(tau=0.0, workers=1)
    with pytest.raises(ArgumentError):
        ExperimentConfig(ball="1", workers=1)
    with pytest.raises(ArgumentError):
        ExperimentConfig(solver="simplex", workers=1)
    with pytest.raises(ArgumentError):
        ExperimentConfig(delta_grid=(0.2, 0.1), workers=1)


def test_config_from_mapping():
    cfg = ExperimentConfig.from_mapping({"n-grid": [100, 200], "trials": 3, "singular-factor": 1.0})
    assert cfg.n_grid == (100, 200)
    assert cfg.singular_factor == 1.0
    assert ExperimentConfig.from_mapping({"n_grid": "100,300"}).n_grid == (100, 300)
    with pytest.raises(ArgumentError):
        ExperimentConfig.from_mapping({"n_grd": [100]})
    echo = cfg.to_mapping()
    assert "workers" not in echo and "quiet" not in echo
    assert echo["n_grid"] == [100, 200]


def test_config_sizes_and_bandwidths():
    circle = shape_by_name("circle")
    split_cfg = ExperimentConfig(n_grid=(1000,), workers=1)
    assert split_cfg.sample_size(1000) == 1000
    assert split_cfg.bandwidths(circle) == [pytest.approx(0.1)]
    assert ExperimentConfig(variant="V", workers=1).sample_size(1000) == 4000
    fixed = ExperimentConfig(n_grid=(100, 200), delta=0.3, workers=1)
    assert fixed.bandwidths(circle) == [0.3, 0.3]
    assert fixed.resolution(circle) == pytest.approx(0.03)
    with pytest.raises(ArgumentError):
        ExperimentConfig(delta=0.1, h=0.05, workers=1).resolution(circle)


def test_workers_from_env(monkeypatch):
    monkeypatch.setenv("VARIFOLD_WORKERS", "3")
    assert workers_from_env() == 3
    monkeypatch.setenv("VARIFOLD_WORKERS", "0")
    assert workers_from_env() == 1
    monkeypatch.setenv("VARIFOLD_WORKERS", "many")
    with pytest.raises(ArgumentError):
        workers_from_env()


def test_trial_seed():
    seeds = {trial_seed(1, i, t) for i in range(3) for t in range(5)}
    assert len(seeds) == 15
    assert trial_seed(1, 0, 0) == trial_seed(1, 0, 0)
    assert 0 <= trial_seed(1, 2, 3) < 2**32


def test_fit_slope():
    grid = np.array([1.0, 2.0, 4.0, 8.0])
    slope, intercept = fit_slope(grid, 3.0 * grid ** -0.5)
    assert slope == pytest.approx(-0.5)
    assert intercept == pytest.approx(math.log(3.0))
    assert fit_slope([10.0], [1.0]) == (None, None)
    assert fit_slope([1.0, 2.0], [1.0, 0.0]) == (None, None)


def test_experiment_error_tags():
    err = ExperimentError("flow failed", n=200, trial=3, seed=42)
    assert str(err) == "flow failed (N=200, trial=3, seed=42)"
    restored = pickle.loads(pickle.dumps(err))
    assert str(restored) == str(err)
    assert restored.seed == 42
    assert str(ExperimentError("plain")) == "plain"


def test_rate_experiment_is_deterministic():
    first = run_rate_experiment(_tiny())
    second = run_rate_experiment(_tiny())
    assert trials_csv(first) == trials_csv(second)
    assert len(first.rows) == 4
    assert first.slope is not None
    assert all(v > 0 for v in first.means)
    assert first.deltas[0] > first.deltas[1]
    assert first.seeds[0] == [trial_seed(first.config["seed"], 0, t) for t in range(2)]
    assert "mass_median" in first.secondary


def test_single_point_grid_has_no_slope():
    result = run_measure_experiment(_tiny(n_grid=(200,)))
    assert result.slope is None
    assert result.slope_half_width is None
    assert len(result.means) == 1
    assert result.secondary["mass_mean"][0] > 0


def test_trial_failures_are_tagged():
    with pytest.raises(ExperimentError) as info:
        run_rate_experiment(_tiny(n_grid=(50,), trials=1, delta=0.3, ball="0,0,0,1"))
    assert info.value.n == 50
    assert info.value.trial == 0
    assert info.value.seed == trial_seed(DEFAULT_SEED, 0, 0)


def test_emit_results(tmp_path):
    cfg = _tiny(n_grid=(100, 200), delta=0.3)
    result = run_rate_experiment(cfg)
    paths = emit_results(result, tmp_path / "a")
    lines = paths["trials"].read_text().splitlines()
    assert lines[0] == ",".join(TRIAL_COLUMNS[ExperimentKind.RATE])
    assert len(lines) == 1 + 4
    summary = json.loads(paths["summary"].read_text())
    assert list(summary)[:3] == ["experiment", "config", "grid"]
    assert summary["slope"] == result.slope
    assert summary["all_exact"] is True
    assert ExperimentConfig.from_mapping(load_config_file(paths["summary"])).to_mapping() == cfg.to_mapping()
    again = emit_results(result, tmp_path / "b")
    assert json.loads(again["summary"].read_text())["hash"] == summary["hash"]


def test_fluctuation_experiment():
    cfg = _tiny(n_grid=(200, 800), trials=6, delta=0.2, bootstrap=0)
    result = run_fluctuation_experiment(cfg)
    assert result.kind == "fluct"
    assert result.grid == [200.0, 800.0]
    assert result.slope_half_width is None
    assert all(s > 0 for s in result.means)
    parallel = run_fluctuation_experiment(_tiny(n_grid=(200, 800), trials=6, delta=0.2, bootstrap=0, workers=2))
    assert trials_csv(parallel) == trials_csv(result)


def test_fluctuation_delta_grid():
    result = run_fluctuation_experiment(_tiny(n_grid=(400,), delta_grid=(0.1, 0.2, 0.4), trials=4))
    assert result.grid == [0.1, 0.2, 0.4]
    assert result.deltas == [0.1, 0.2, 0.4]
    assert {row["n"] for row in result.rows} == {400}
    with pytest.raises(ArgumentError):
        run_fluctuation_experiment(_tiny(delta_grid=(0.1, 0.2)))


def test_fluctuation_rejects_singular_point():
    with pytest.raises(ArgumentError):
        run_fluctuation_experiment(_tiny(shape="square", point=(0.5, 0.5)))
    with pytest.raises(ArgumentError):
        run_fluctuation_experiment(_tiny(shape="square"), x=[0.5, 0.5])


def test_tangent_experiment_on_square():
    result = run_tangent_experiment(_tiny(shape="square", bootstrap=0))
    fractions = [row["kept_fraction"] for row in result.rows]
    assert all(0.0 < f <= 1.0 for f in fractions)
    for restricted, unrestricted in zip(result.means, result.secondary["unrestricted_mean"]):
        assert restricted <= unrestricted + 1e-12


def test_run_experiment_dispatch():
    result = run_experiment("fluct", _tiny(n_grid=(100,), delta=0.3, bootstrap=0))
    assert result.kind == "fluct"
    with pytest.raises(ValueError):
        run_experiment("variance", _tiny())


def test_flat_distances_report_exactness():
    auto = run_rate_experiment(_tiny(n_grid=(400,), trials=1, delta=0.3, bootstrap=0))
    assert auto.rows[0]["support"] + shape_by_name("circle").quadrature_varifold(0.03).size > 600
    assert auto.rows[0]["exact"] is True
    assert auto.all_exact is True
    sparse = run_measure_experiment(_tiny(n_grid=(100,), trials=2, delta=0.3, bootstrap=0, solver="sparse"))
    assert sparse.all_exact is False
    assert summary_mapping(sparse)["all_exact"] is False
    assert all(line.endswith(",False") for line in trials_csv(sparse).splitlines()[1:])
    assert run_fluctuation_experiment(_tiny(n_grid=(100,), delta=0.3, bootstrap=0)).all_exact is None


def test_density_experiment():
    result = run_density_experiment(_tiny(n_grid=(200, 800), trials=3, bootstrap=0))
    assert result.kind == "density"
    assert result.deltas[0] > result.deltas[1]
    truth = 1 / (2 * math.pi)
    for row in result.rows:
        assert row["value"] == pytest.approx(abs(row["estimate"] - truth))
    assert trials_csv(result).splitlines()[0] == ",".join(TRIAL_COLUMNS[ExperimentKind.DENSITY])
    assert run_experiment("density", _tiny(n_grid=(100,), trials=1, bootstrap=0)).kind == "density"
    with pytest.raises(ArgumentError):
        run_density_experiment(_tiny(shape="square", point=(0.5, 0.5)))


def test_reference_resolution_barely_moves_the_distance():
    circle = shape_by_name("circle")
    estimate = split_varifold_estimate(sample_split(circle, 200, seed=17), 1, 1.0, 1.0, 0.05)
    h = 0.02
    coarse, fine = circle.quadrature_varifold(h), circle.quadrature_varifold(h / 2)
    first = flat_norm(FlatMetricProblem(estimate, coarse), method="exact").value
    second = flat_norm(FlatMetricProblem(estimate, fine), method="exact").value
    gap = flat_norm(FlatMetricProblem(coarse, fine), method="exact").value
    assert abs(first - second) <= gap + 1e-9
    assert gap <= 4 * math.pi * h


@pytest.mark.slow
def test_fluctuation_exponent():
    cfg = ExperimentConfig(n_grid=(500, 1000, 2000, 4000, 8000, 16000, 32000), trials=400, delta=0.2,
                           bootstrap=0, quiet=True)
    result = run_fluctuation_experiment(cfg)
    assert abs(result.slope + 0.5) <= 0.1


@pytest.mark.slow
def test_varifold_rate_on_circle():
    result = run_rate_experiment(ExperimentConfig(bootstrap=0, quiet=True))
    assert abs(result.slope + 1 / 3) <= 0.15
    assert result.monotone_decreasing


@pytest.mark.slow
def test_measure_rate_on_circle():
    result = run_measure_experiment(ExperimentConfig(bootstrap=0, quiet=True))
    assert abs(result.slope + 1 / 3) <= 0.15
    assert result.secondary["mass_median"][-1] == pytest.approx(2 * math.pi, rel=0.02)


@pytest.mark.slow
def test_tangent_rates():
    circle = run_tangent_experiment(ExperimentConfig(bootstrap=0, quiet=True))
    assert abs(circle.slope + 1 / 3) <= 0.15
    sphere = run_tangent_experiment(ExperimentConfig(shape="sphere", bootstrap=0, quiet=True))
    assert abs(sphere.slope + 0.25) <= 0.15


@pytest.mark.slow
def test_singular_shapes():
    """Rates on the square and the cross.

    Away from corners and crossings every edge is straight, so the restricted
    tangent error is zero up to rounding and carries no rate; the slope is fitted
    on the unrestricted error instead, on a grid that stops at N = 4000.
    """
    for shape in ("square", "cross"):
        cfg = ExperimentConfig(shape=shape, n_grid=(250, 500, 1000, 2000, 4000), bootstrap=0, quiet=True)
        assert run_rate_experiment(cfg).monotone_decreasing
        tangent = run_tangent_experiment(cfg)
        unrestricted = tangent.secondary["unrestricted_mean"]
        assert all(u > r for r, u in zip(tangent.means, unrestricted))
        assert max(tangent.means) <= 1e-8
        slope, _ = fit_slope(tangent.grid, unrestricted)
        assert abs(slope + 1 / 3) <= 0.2


@pytest.mark.slow
def test_pointwise_density_rate_on_circle():
    result = run_density_experiment(ExperimentConfig(trials=100, bootstrap=0, quiet=True))
    assert abs(result.slope + 1 / 3) <= 0.15
