import numpy as np
import pytest

from mppfv.grid import (BoundaryCondition, CellField, Dirichlet, Grid1D, Grid2D, Periodic,
                        extend_with_ghosts, project_cell_averages, project_cell_averages_2d)


def test_grid1d_geometry():
    g = Grid1D(0.0, 1.0, 4)
    assert g.dx == 0.25
    np.testing.assert_allclose(g.centers, [0.125, 0.375, 0.625, 0.875])
    np.testing.assert_allclose(g.interfaces, [0, 0.25, 0.5, 0.75, 1.0])


def test_grid_rejects_bad_sizes():
    with pytest.raises(ValueError):
        Grid1D(0.0, 1.0, 0)
    with pytest.raises(ValueError):
        Grid1D(1.0, 0.0, 4)
    with pytest.raises(ValueError):
        Grid2D(0, 1, 0, 1, 3, 0)


def test_grid2d_shape_is_y_major():
    g = Grid2D(0, 2, 0, 1, 4, 2)
    assert g.shape == (2, 4)
    assert g.dx == 0.5 and g.dy == 0.5


def test_project_constant():
    g = Grid1D(0, 3, 7)
    np.testing.assert_allclose(project_cell_averages(lambda x: 2.5 + 0 * x, g).values, 2.5)


def test_project_linear_midpoints():
    g = Grid1D(0, 1, 2)
    np.testing.assert_allclose(project_cell_averages(lambda x: x, g).values, [0.25, 0.75])


def test_project_sin4_first_cell():
    g = Grid1D(0, 2 * np.pi, 4)
    # adaptive quadrature reference, frozen
    assert project_cell_averages(lambda x: np.sin(x) ** 4, g, 14).values[0] == pytest.approx(0.375, abs=1e-14)
    g6 = Grid1D(0, 2 * np.pi, 6)
    ref = 3 / 8 - 27 * np.sqrt(3) / (64 * np.pi)
    assert project_cell_averages(lambda x: np.sin(x) ** 4, g6, 14).values[0] == pytest.approx(ref, abs=1e-14)


@pytest.mark.parametrize("deg", range(0, 16))
def test_project_polynomial_exactness(deg):
    g = Grid1D(-1.0, 2.0, 5)
    avg = project_cell_averages(lambda x: x ** deg, g, quad_points=8).values
    a, b = g.interfaces[:-1], g.interfaces[1:]
    exact = (b ** (deg + 1) - a ** (deg + 1)) / ((deg + 1) * g.dx)
    np.testing.assert_allclose(avg, exact, rtol=1e-13, atol=1e-13)


def test_project_rejects_nonfinite():
    with pytest.raises(ValueError), np.errstate(divide="ignore", invalid="ignore"):
        project_cell_averages(lambda x: 1 / (x - x), Grid1D(0, 1, 3))


def test_project_2d_constant_and_linear():
    g = Grid2D(0, 1, 0, 1, 3, 2)
    np.testing.assert_allclose(project_cell_averages_2d(lambda x, y: 4 + 0 * x * y, g).values, 4)
    g1 = Grid2D(0, 1, 0, 1, 1, 1)
    assert project_cell_averages_2d(lambda x, y: x + y, g1).values[0, 0] == pytest.approx(1.0)


def test_project_2d_sin4():
    g = Grid2D(0, 2 * np.pi, 0, 2 * np.pi, 2, 2)
    vals = project_cell_averages_2d(lambda x, y: np.sin(x + y) ** 4, g, quad_points=10).values
    # dblquad reference, frozen
    assert vals[1, 1] == pytest.approx(0.375, abs=1e-13)


def test_project_2d_orientation():
    g = Grid2D(0, 2, 0, 1, 2, 1)
    v = project_cell_averages_2d(lambda x, y: x + 0 * y, g).values
    np.testing.assert_allclose(v, [[0.5, 1.5]])


def test_ghosts_periodic_wrap():
    f = CellField(Grid1D(0, 1, 3), [1, 2, 3], BoundaryCondition.periodic(1))
    np.testing.assert_array_equal(extend_with_ghosts(f, 2), [2, 3, 1, 2, 3, 1, 2])
    f2 = CellField(Grid1D(0, 1, 2), [5, 7], BoundaryCondition.periodic(1))
    np.testing.assert_array_equal(extend_with_ghosts(f2, 1), [7, 5, 7, 5])


def test_ghosts_dirichlet_fill():
    f = CellField(Grid1D(0, 1, 3), [1, 2, 3], BoundaryCondition.dirichlet(0.0, 5.0))
    np.testing.assert_array_equal(extend_with_ghosts(f, 1), [0, 1, 2, 3, 5])
    np.testing.assert_array_equal(extend_with_ghosts(f, 3)[:3], [0, 0, 0])


def test_ghosts_2d_periodic():
    g = Grid2D(0, 1, 0, 1, 3, 2)
    v = np.arange(6.0).reshape(2, 3)
    e = extend_with_ghosts(CellField(g, v, BoundaryCondition.periodic(2)), 1)
    assert e.shape == (4, 5)
    np.testing.assert_array_equal(e[1:-1, 1:-1], v)
    np.testing.assert_array_equal(e[0, 1:-1], v[-1])
    np.testing.assert_array_equal(e[1:-1, 0], v[:, -1])


def test_bc_pairs_must_match():
    with pytest.raises(ValueError):
        BoundaryCondition(Periodic(), Dirichlet(0.0))
    bc = BoundaryCondition.dirichlet(1.0, 0.0)
    assert not bc.is_periodic("x")
    assert bc.dirichlet_values() == [1.0, 0.0]


def test_cellfield_validation():
    g = Grid1D(0, 1, 3)
    with pytest.raises(ValueError):
        CellField(g, [1, 2])
    with pytest.raises(ValueError):
        CellField(g, [1, np.nan, 2])
    f = CellField(g, [1, 2, 3])
    assert f.min() == 1 and f.max() == 3
    assert f.mass() == pytest.approx(2.0)
