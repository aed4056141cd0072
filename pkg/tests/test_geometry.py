import math

import numpy as np
import pytest
from scipy import stats
from src.errors import ArgumentError, SingularPointError
from src.geometry import *


def test_shape_by_name_aliases():
    assert isinstance(shape_by_name("square"), SquareBoundary)
    assert isinstance(shape_by_name("cross"), CrossSegments)
    assert isinstance(shape_by_name("disk"), DiskWithBoundary)
    stadium = shape_by_name("stadium:radius=0.5,length=1")
    assert stadium.hausdorff_measure == pytest.approx(2 + math.pi)
    with pytest.raises(ValueError):
        shape_by_name("torus")
    with pytest.raises(ValueError):
        shape_by_name("circle:side=2")


def test_circle_oracles():
    circle = Circle()
    assert circle.hausdorff_measure == pytest.approx(2 * math.pi)
    assert circle.density_at(np.array([1.0, 0.0])) == pytest.approx(1 / (2 * math.pi))
    assert np.allclose(circle.tangent_at(np.array([1.0, 0.0])), [[0.0, 0.0], [0.0, 1.0]])
    assert np.isinf(circle.singular_distance(np.array([0.0, 1.0])))
    assert circle.regularity.a == 1.0
    assert circle.regularity.singular_strata == ()


def test_circle_ahlfors_constant():
    circle = Circle()
    # theta = 1/(2 pi), k_low = 2, k_up = pi
    assert circle.ahlfors_C0 == pytest.approx(1.5 * math.pi)


def test_square_corners_are_singular():
    square = SquareBoundary()
    with pytest.raises(SingularPointError):
        square.tangent_at(np.array([0.5, 0.5]))
    assert np.allclose(square.tangent_at(np.array([0.5, 0.0])), [[0.0, 0.0], [0.0, 1.0]])
    assert square.singular_distance(np.array([0.5, 0.25])) == pytest.approx(0.25)
    assert square.regularity.singular_strata[0].dim == 0


def test_cross_has_five_singular_points():
    cross = CrossSegments()
    assert cross.singular_points.shape == (5, 2)
    assert cross.hausdorff_measure == pytest.approx(4.0)
    with pytest.raises(SingularPointError):
        cross.tangent_at(np.zeros(2))


def test_jump_density_on_cross_is_rejected():
    with pytest.raises(ArgumentError):
        shape_by_name("cross", "jump")


def test_jump_density_on_circle():
    circle = shape_by_name("circle", "jump")
    assert circle.density_at(np.array([1.0, 0.0])) == pytest.approx(2 * circle.density_at(np.array([-1.0, 0.0])))
    assert circle.singular_distance(np.array([0.0, 1.0])) == pytest.approx(0.0, abs=1e-9)
    assert len(circle.regularity.singular_strata) == 1


def test_densities_integrate_to_one():
    for name in ("tilt", "holder:b=0.5", "jump"):
        for shape in ("circle", "stadium", "sphere"):
            model = shape_by_name(shape, name)
            points, weights = model.quadrature_cells(model.diameter / 200)
            assert np.dot(weights, model.density_at(points)) == pytest.approx(1.0, rel=1e-2)


def test_quadrature_varifold_masses():
    for shape, mass in ((Circle(), 2 * math.pi), (Segment(2.0), 2.0), (SquareBoundary(), 4.0),
                        (Sphere(), 4 * math.pi), (DiskWithBoundary(), math.pi)):
        h = shape.diameter / 50
        reference = shape.quadrature_varifold(h)
        assert reference.total_mass == pytest.approx(mass, rel=1e-9)
        assert reference.check_projectors(1e-10)


def test_quadrature_varifold_rejects_coarse_resolution():
    with pytest.raises(ArgumentError):
        Circle().quadrature_varifold(0.5)


def test_quadrature_cell_count_on_circle():
    points, weights = Circle().quadrature_cells(2 * math.pi / 1000)
    assert points.shape == (1000, 2)
    assert np.allclose(np.linalg.norm(points, axis=1), 1.0)


def test_sphere_tangent():
    sphere = Sphere()
    P = sphere.tangent_at(np.array([0.0, 0.0, 1.0]))
    assert np.allclose(P, np.diag([1.0, 1.0, 0.0]))
    assert sphere.intrinsic_dim == 2


def test_holder_graph_parameters():
    graph = HolderGraph(s=0.5, t=4.0, J=6)
    assert graph.a == pytest.approx(0.5)
    assert graph.hausdorff_measure > 1.0
    with pytest.raises(ArgumentError):
        HolderGraph(s=0.2, t=4.0)


def test_singular_offset_scaling():
    square = SquareBoundary()
    radii = np.array([0.01, 0.02, 0.04, 0.08, 0.16])
    masses = np.array([singular_offset_mass(square, rho, 1e-3) for rho in radii])
    fit = stats.linregress(np.log(radii), np.log(masses))
    assert abs(fit.slope - 1.0) <= 0.1


def test_flat_plane_quadrature_mass():
    measure = flat_plane_quadrature(2, 3, np.zeros(3), np.diag([1.0, 0.0, 1.0]), 1.0, 0.1)
    assert measure.total_mass == pytest.approx(4.0)
    assert np.allclose(measure.points[:, 1], 0.0)


def test_empirical_ahlfors_bounds():
    rng = np.random.default_rng(3)
    cases = (("circle", "uniform"), ("circle", "tilt"), ("segment", "uniform"), ("stadium", "uniform"),
             ("square", "uniform"), ("cross", "uniform"), ("sphere", "uniform"), ("disk", "uniform"))
    for name, density in cases:
        shape = shape_by_name(name, density)
        d = shape.intrinsic_dim
        h = shape.diameter / (400 if d == 1 else 60)
        points, cells = shape.quadrature_cells(h)
        mass = cells * shape.density_at(points)
        C0 = shape.ahlfors_C0
        for _ in range(100):
            x = points[rng.integers(points.shape[0])]
            r = rng.uniform(20 * h, shape.diameter)
            ball = mass[np.linalg.norm(points - x, axis=1) < r].sum()
            assert r**d / C0 <= ball <= C0 * r**d, (name, density, r)
