import numpy as np
import pytest

from mppfv.flux import (MonotoneFluxKind, Operator1D, Operator2D, edge_fluxes_2d,
                        first_order_combined_flux_1d, godunov, high_order_convection_flux_1d,
                        high_order_diffusion_flux_1d, incompressible_edge_fluxes, lax_friedrichs,
                        max_abs_derivative, over_diffusive_lf)
from mppfv.grid import BoundaryCondition, CellField, Grid1D, Grid2D, project_cell_averages_2d
from mppfv.problems import ProblemSpec, VelocityField, bl_flux, make_problem
from mppfv.reconstruct import ReconScheme


def burgers(u):
    return 0.5 * np.asarray(u) ** 2


def ident(u):
    return np.asarray(u, dtype=float)


def ones(u):
    return np.ones_like(np.asarray(u, dtype=float))


def test_lf_examples():
    assert lax_friedrichs(3.0, 3.0, burgers, 1.0) == pytest.approx(4.5)
    for um, up in [(0.2, 0.9), (-1.0, 4.0)]:
        assert lax_friedrichs(um, up, ident, 1.0) == pytest.approx(um)
    assert lax_friedrichs(2.0, 0.0, burgers, 2.0) == pytest.approx(3.0)


def test_godunov_examples():
    assert godunov(0.3, 0.9, ident) == pytest.approx(0.3)
    assert godunov(-1.0, 1.0, burgers) == pytest.approx(0.0, abs=1e-14)
    # dense sampling oracle on [0, 1]
    ref = bl_flux(np.linspace(0, 1, 100001)).max()
    assert godunov(1.0, 0.0, bl_flux) == pytest.approx(ref, abs=1e-12)
    assert godunov(1.0, 0.0, bl_flux) == pytest.approx(1.0)


def test_godunov_upwinds_with_sign_of_speed():
    assert godunov(-0.5, -0.2, burgers) == pytest.approx(burgers(-0.2))
    assert godunov(0.4, 0.7, burgers) == pytest.approx(burgers(0.4))


def test_over_diffusive_examples():
    assert over_diffusive_lf(1.0, 1.0, 1.2) == pytest.approx(1.0)
    assert over_diffusive_lf(1.0, 0.0, 1.2) == pytest.approx(1.1)
    assert over_diffusive_lf(0.0, 1.0, 1.2) == pytest.approx(-0.1)


def test_monotone_kind_validation():
    with pytest.raises(ValueError):
        MonotoneFluxKind("roe")
    with pytest.raises(ValueError):
        MonotoneFluxKind("overdiffusive", 0.9)


def test_max_abs_derivative_sampled():
    assert max_abs_derivative(ident, -2, 1) == pytest.approx(2.0)
    assert max_abs_derivative(ones, 0, 1) == 1.0


def _spec(**kw):
    base = dict(name="t", dim=1, domain=(0.0, 2.0), bc=BoundaryCondition.periodic(1))
    base.update(kw)
    return ProblemSpec(**base)


def test_first_order_constant_field():
    p = make_problem("burgers_1d")
    g = Grid1D(-1, 1, 8)
    h = first_order_combined_flux_1d(CellField(g, np.full(8, 0.7)), p)
    np.testing.assert_allclose(h, burgers(0.7), atol=1e-15)


def test_first_order_discrete_laplacian():
    p = _spec(a=ident, da=ones, has_convection=False)
    h = first_order_combined_flux_1d(CellField(Grid1D(0, 2, 2), [0.0, 1.0]), p)
    np.testing.assert_allclose(h, [1.0, -1.0, 1.0])


def test_first_order_burgers_lf():
    p = _spec(f=burgers, df=ident, has_diffusion=False, bounds=(0.0, 2.0))
    h = first_order_combined_flux_1d(CellField(Grid1D(0, 2, 2), [2.0, 0.0]), p,
                                     low_kind=MonotoneFluxKind("lf", 2.0))
    assert h[1] == pytest.approx(3.0)


def _poly_problem(bc=None):
    return _spec(domain=(0.0, 12.0), f=ident, df=ones, a=ident, da=ones,
                 bc=bc or BoundaryCondition.dirichlet(0.0, 0.0), bounds=(0.0, 1.0))


def unit_averages(p, centers):
    c = np.asarray(centers, dtype=float)
    return ((c + 0.5) ** (p + 1) - (c - 0.5) ** (p + 1)) / (p + 1)


def test_high_convection_constant_and_quartic():
    p = _poly_problem(BoundaryCondition.periodic(1))
    g = Grid1D(0, 12, 12)
    H = high_order_convection_flux_1d(CellField(g, np.full(12, 0.25)), p, ReconScheme(2))
    np.testing.assert_allclose(H, 0.25, atol=1e-15)
    scale = 12.0 ** 4
    u = unit_averages(4, g.centers) / scale
    H = high_order_convection_flux_1d(CellField(g, u), p, ReconScheme(2))
    interior = slice(3, 10)
    np.testing.assert_allclose(H[interior], g.interfaces[interior] ** 4 / scale, atol=1e-14)


def test_high_diffusion_constant_is_zero():
    p = _poly_problem(BoundaryCondition.periodic(1))
    H = high_order_diffusion_flux_1d(CellField(Grid1D(0, 12, 12), np.full(12, 0.3)), p)
    assert np.all(H == 0.0)


def test_high_diffusion_quadratic_exact():
    p = _poly_problem()
    g = Grid1D(0, 12, 12)
    H = high_order_diffusion_flux_1d(CellField(g, unit_averages(2, g.centers)), p)
    np.testing.assert_allclose(H[2:11], 2 * g.interfaces[2:11], atol=1e-11)


def test_high_diffusion_fourth_order_for_square():
    p = _spec(domain=(0.0, 1.0), a=lambda u: np.asarray(u) ** 2, da=lambda u: 2 * np.asarray(u),
              has_convection=False)
    errs = []
    for n in (20, 40, 80):
        g = Grid1D(0, 1, n)
        xf = g.interfaces
        k = 2 * np.pi
        u = 0.5 + 0.3 * (np.cos(k * xf[:-1]) - np.cos(k * xf[1:])) / (k * g.dx)
        H = high_order_diffusion_flux_1d(CellField(g, u), p)
        exact = 2 * (0.5 + 0.3 * np.sin(k * xf)) * 0.3 * k * np.cos(k * xf)
        errs.append(np.abs(H - exact).max())
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 3.8)


def _two_d(f=ident, df=ones, a=None, da=None, g=None, dg=None, b=None, db=None):
    z = lambda u: np.zeros_like(np.asarray(u, dtype=float))
    return ProblemSpec("t2", 2, (0.0, 1.0, 0.0, 1.0), f=f, df=df, g=g or z, dg=dg or z,
                       a=a or z, da=da or z, b=b or z, db=db or z,
                       bc=BoundaryCondition.periodic(2), bounds=(0.0, 1.0),
                       has_diffusion=a is not None)


def test_edge_fluxes_constant():
    p = make_problem("buckley_2d")
    grid = Grid2D(-1.5, 1.5, -1.5, 1.5, 8, 8)
    Hx, Hy = edge_fluxes_2d(CellField(grid, np.full((8, 8), 0.6)), p, ReconScheme(2))
    assert Hx.shape == (8, 9) and Hy.shape == (9, 8)
    np.testing.assert_allclose(Hx, p.f(0.6), atol=1e-14)
    np.testing.assert_allclose(Hy, p.g(0.6), atol=1e-14)


def test_edge_fluxes_reduce_to_1d_rows():
    sq = lambda u: np.asarray(u) ** 2
    p2 = _two_d(f=burgers, df=ident, a=sq, da=lambda u: 2 * np.asarray(u))
    p1 = _spec(domain=(0.0, 1.0), f=burgers, df=ident, a=sq, da=lambda u: 2 * np.asarray(u))
    grid = Grid2D(0, 1, 0, 1, 16, 8)
    row = np.sin(2 * np.pi * grid.xc) ** 2
    Hx, _ = Operator2D(p2, grid, ReconScheme(2)).high(np.tile(row, (8, 1)))
    H1 = Operator1D(p1, Grid1D(0, 1, 16), ReconScheme(2)).high(row)
    np.testing.assert_allclose(Hx, np.tile(H1, (8, 1)), atol=1e-13)


def test_edge_fluxes_quartic_in_x():
    p = ProblemSpec("q", 2, (0.0, 12.0, 0.0, 4.0), f=ident, df=ones,
                    bc=BoundaryCondition.periodic(2), has_diffusion=False)
    grid = Grid2D(0, 12, 0, 4, 12, 4)
    scale = 12.0 ** 4
    u = np.tile(unit_averages(4, grid.xc), (4, 1)) / scale
    Hx, _ = Operator2D(p, grid, ReconScheme(2)).high(u)
    np.testing.assert_allclose(Hx[:, 3:10], np.tile(grid.xf[3:10] ** 4, (4, 1)) / scale, atol=1e-14)


def test_incompressible_constant_is_fixed_point():
    p = make_problem("rotation_2d", re=1e4)
    grid = Grid2D(-np.pi, np.pi, -np.pi, np.pi, 16, 16)
    op = Operator2D(p, grid, ReconScheme(2))
    u = np.full((16, 16), 0.4)
    h = op.low(u, 0.0)
    np.testing.assert_allclose(u - 0.01 * op.divergence(h), 0.4, atol=1e-14)


def test_rotation_edge_velocities_divergence_free():
    p = make_problem("rotation_2d")
    grid = Grid2D(-np.pi, np.pi, -np.pi, np.pi, 16, 16)
    U, V = Operator2D(p, grid, ReconScheme(2)).edge_velocity(np.zeros((16, 16)), 0.0) \
        .first_order_edge_velocities(grid)
    div = (U[:, 1:] - U[:, :-1]) / grid.dx + (V[1:] - V[:-1]) / grid.dy
    assert np.abs(div).max() < 1e-13


def test_zero_velocity_zero_flux():
    z = lambda x, y, t: 0 * x + 0 * y
    p = ProblemSpec("still", 2, (0.0, 1.0, 0.0, 1.0), bc=BoundaryCondition.periodic(2),
                    velocity=VelocityField(z, z, z), has_diffusion=False)
    grid = Grid2D(0, 1, 0, 1, 8, 8)
    fld = project_cell_averages_2d(lambda x, y: np.sin(2 * np.pi * x) ** 2 + y, grid)
    for order in ("high", "low"):
        Hx, Hy = incompressible_edge_fluxes(fld, p, ReconScheme(2), order=order)
        assert np.all(Hx == 0) and np.all(Hy == 0)
