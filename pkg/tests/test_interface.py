import pytest
from src.harness import RateResult
from src.interface import *


def _result(grid, slope=None, kind="rate", config=None):
    size = len(grid)
    return RateResult(kind, list(grid), [0.2] * size, [0.1] * size, [0.01] * size, [0.1] * size,
                      slope, None if slope is None else 0.05, None, [],
                      config or {"shape": "circle", "density": "uniform", "variant": "split"},
                      {"mass_median": [6.2] * size})


def test_display_message(capsys):
    ui = UserInterface()
    ui.display_message("hello")
    ui.display_error("bad input")
    captured = capsys.readouterr()
    assert captured.out == "hello\n"
    assert captured.err == "Error: bad input\n"
    assert repr(ui) == "UserInterface()"


def test_display_result_one_line(capsys):
    UserInterface().display_result(_result([100.0, 200.0], slope=-0.33))
    assert capsys.readouterr().out == "rate: slope=-0.33 +/- 0.05\n"


def test_console_table(capsys):
    ConsoleInterface().display_result(_result([100.0, 200.0], slope=-0.3333))
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "rate experiment on circle (uniform, variant split)"
    assert lines[1].split() == ["N", "delta", "mean", "stderr", "median"]
    assert lines[2].split()[0] == "100"
    assert lines[4].split()[0] == "mass_median:"
    assert lines[-1] == "slope: -0.3333 +/- 0.05"


def test_console_undefined_slope(capsys):
    ConsoleInterface().display_result(_result([100.0]))
    assert capsys.readouterr().out.splitlines()[-1] == "slope: undefined (fewer than two grid points)"


def test_console_delta_grid_label(capsys):
    config = {"shape": "circle", "density": "uniform", "variant": "split", "delta_grid": [0.1, 0.2]}
    ConsoleInterface().display_result(_result([0.1, 0.2], slope=0.5, kind="fluct", config=config))
    assert capsys.readouterr().out.splitlines()[1].split()[0] == "delta"


def test_console_flags_sparse_distances(capsys):
    result = _result([100.0, 200.0], slope=-0.3)
    result.all_exact = False
    ConsoleInterface().display_result(result)
    assert "note: some flat distances came from the sparsified solver" in capsys.readouterr().out.splitlines()
    result.all_exact = True
    ConsoleInterface().display_result(result)
    assert "sparsified" not in capsys.readouterr().out
