import numpy as np
import pytest
from src.errors import ArgumentError
from src.geometry import shape_by_name
from src.sampling import *


def test_sample_is_deterministic():
    circle = shape_by_name("circle")
    first = sample(circle, 200, seed=7)
    second = sample(circle, 200, seed=7)
    assert np.array_equal(first.points, second.points)
    assert not np.array_equal(first.points, sample(circle, 200, seed=7, stream=1).points)
    assert not np.array_equal(first.points, sample(circle, 200, seed=8).points)


def test_sample_lies_on_shape():
    batch = sample(shape_by_name("circle"), 500, seed=1)
    assert batch.size == 500
    assert np.allclose(np.linalg.norm(batch.points, axis=1), 1.0, atol=1e-12)
    sphere = sample(shape_by_name("sphere"), 300, seed=1)
    assert sphere.points.shape == (300, 3)
    assert np.allclose(np.linalg.norm(sphere.points, axis=1), 1.0, atol=1e-12)


def test_sample_rejects_bad_size():
    with pytest.raises(ArgumentError):
        sample(shape_by_name("circle"), 0, seed=1)
    with pytest.raises(ArgumentError):
        sample(shape_by_name("circle"), 10, seed=-1)


def test_rejection_sampling_follows_tilt():
    batch = sample(shape_by_name("circle", "tilt"), 20000, seed=3)
    # theta = (2 + x1) / (4 pi) gives E[x1] = 1/4
    assert abs(np.mean(batch.points[:, 0]) - 0.25) < 0.03
    assert np.allclose(np.linalg.norm(batch.points, axis=1), 1.0, atol=1e-12)


def test_empirical_measure():
    measure = sample(shape_by_name("segment"), 40, seed=2).as_measure()
    assert measure.total_mass == pytest.approx(1.0)
    assert np.all(measure.weights == 1 / 40)


def test_split_by_index():
    batch = sample(shape_by_name("circle"), 12, seed=5)
    parts = split(batch)
    assert parts.size == 3
    assert np.array_equal(parts.y.points, batch.points[1::4])
    with pytest.raises(ArgumentError):
        split(sample(shape_by_name("circle"), 10, seed=5))


def test_sample_split_uses_distinct_streams():
    parts = sample_split(shape_by_name("circle"), 50, seed=11)
    assert parts.size == 50
    streams = [part.stream for part in parts.parts]
    assert streams == [1, 2, 3, 4]
    assert not np.array_equal(parts.x.points, parts.z.points)


def test_split_sample_requires_equal_sizes():
    circle = shape_by_name("circle")
    a, b = sample(circle, 4, seed=1), sample(circle, 5, seed=1)
    with pytest.raises(ArgumentError):
        SplitSample(a, a, a, b)


def test_range_query_is_strict():
    index = SpatialIndex(np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.0], [3.0, 3.0]]))
    assert list(index.range_query(np.zeros(2), 1.0)) == [0, 2]
    assert list(index.range_query(np.zeros(2), 1.0 + 1e-9)) == [0, 1, 2]
    with pytest.raises(ArgumentError):
        index.range_query(np.zeros(2), 0.0)


def test_range_query_brute_force_matches_direct():
    rng = np.random.default_rng(0)
    points = rng.standard_normal((300, 10))
    index = SpatialIndex(points)
    x = rng.standard_normal(10)
    expected = np.flatnonzero(np.linalg.norm(points - x, axis=1) < 4.0)
    assert np.array_equal(index.range_query(x, 4.0), expected)


def test_pairs_within():
    rng = np.random.default_rng(1)
    points = rng.random((200, 2))
    queries = rng.random((20, 2))
    rows, cols, dist = SpatialIndex(points).pairs_within(queries, 0.2)
    full = np.linalg.norm(queries[:, None] - points[None], axis=2)
    assert rows.size == int(np.sum(full < 0.2))
    assert np.allclose(dist, full[rows, cols])
    empty_rows, _, _ = SpatialIndex(np.empty((0, 2))).pairs_within(queries, 0.2)
    assert empty_rows.size == 0


def test_points_csv(tmp_path):
    batch = sample(shape_by_name("circle"), 25, seed=4)
    path = save_points_csv(batch, tmp_path / "s.csv")
    loaded = load_points_csv(path)
    assert np.array_equal(loaded.points, batch.points)


def test_empirical_ball_mass_is_unbiased():
    circle = shape_by_name("circle")
    center, radius, N, seeds = np.array([1.0, 0.0]), 0.5, 500, 200
    expected = 2 * np.arcsin(radius / 2) / np.pi
    fractions = [np.mean(np.linalg.norm(sample(circle, N, seed).points - center, axis=1) < radius)
                 for seed in range(seeds)]
    assert abs(np.mean(fractions) - expected) <= 3 * np.sqrt(expected / (seeds * N))
