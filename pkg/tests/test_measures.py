import numpy as np
import pytest
from src.errors import ArgumentError
from src.measures import *


def test_measure_validation():
    with pytest.raises(ArgumentError):
        DiscreteMeasure(np.zeros((2, 2)), np.array([1.0]))
    with pytest.raises(ArgumentError):
        DiscreteMeasure(np.zeros((2, 2)), np.array([1.0, -0.5]))
    with pytest.raises(ArgumentError):
        DiscreteMeasure(np.zeros(3), np.array([1.0]))


def test_measure_properties():
    measure = DiscreteMeasure([[0.0, 0.0], [1.0, 0.0]], [0.25, 0.5])
    assert measure.size == 2
    assert measure.ambient_dim == 2
    assert measure.total_mass == pytest.approx(0.75)
    assert DiscreteMeasure.empty(3).size == 0


def test_varifold_validation():
    points = np.zeros((1, 2))
    with pytest.raises(ArgumentError):
        DiscreteVarifold(points, [1.0], np.array([[[1.0, 0.5], [0.0, 0.0]]]))
    with pytest.raises(ArgumentError):
        DiscreteVarifold(points, [1.0], np.zeros((1, 3, 3)))
    with pytest.raises(ArgumentError):
        DiscreteVarifold(points, [1.0], np.array([np.diag([1.0, 0.0])]), is_projector=True)


def test_check_projectors():
    points = np.zeros((2, 2))
    projectors = np.array([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    varifold = DiscreteVarifold(points, [0.5, 0.5], projectors, is_projector=True, d=1)
    assert varifold.check_projectors()
    assert varifold.as_measure().total_mass == pytest.approx(1.0)
    half = DiscreteVarifold(points, [0.5, 0.5], projectors / 2, is_projector=False, d=1)
    assert not half.check_projectors()


def test_csv_measure(tmp_path):
    measure = DiscreteMeasure([[0.1, 0.2], [0.3, 0.4]], [1 / 3, 2 / 3])
    path = save_csv(measure, tmp_path / "m.csv")
    assert path.read_text().splitlines()[0] == "x1,x2,weight"
    loaded = load_csv(path)
    assert isinstance(loaded, DiscreteMeasure)
    assert np.array_equal(loaded.points, measure.points)
    assert np.array_equal(loaded.weights, measure.weights)


def test_csv_varifold(tmp_path):
    matrices = np.array([[[0.5, 0.5], [0.5, 0.5]], [[1.0, 0.0], [0.0, 0.0]]])
    varifold = DiscreteVarifold([[0.0, 1.0], [2.0, 3.0]], [0.5, 1.5], matrices, True, 1)
    path = save_csv(varifold, tmp_path / "out" / "v.csv")
    assert path.read_text().splitlines()[0] == "x1,x2,weight,m11,m12,m21,m22"
    loaded = load_csv(path, is_projector=True, d=1)
    assert isinstance(loaded, DiscreteVarifold)
    assert np.array_equal(loaded.matrices, matrices)
    assert loaded.check_projectors()


def test_csv_rejects_bad_width(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x1,x2,weight,m11\n0,0,1,1\n")
    with pytest.raises(ValueError):
        load_csv(path)
