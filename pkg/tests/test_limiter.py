import itertools

import numpy as np
import pytest

from mppfv.flux import Operator1D
from mppfv.grid import Grid1D, project_cell_averages
from mppfv.limiter import (BoundViolation, Margins, apply_limited_update, bound_tolerance,
                           cell_inequalities_hold, check_bounds, clamp_margins, combine_theta_1d,
                           compute_margins, compute_margins_1d, limit_1d, limit_2d,
                           limit_cell_2d, limit_max_1d, limit_min_1d)
from mppfv.problems import make_problem
from mppfv.reconstruct import ReconScheme


def test_margins_zero_flux_midpoint():
    m = compute_margins_1d(np.full(4, 0.5), np.zeros(5), 0.3, 0.0, 1.0)
    np.testing.assert_allclose(m.gamma_M, 0.5)
    np.testing.assert_allclose(m.gamma_m, -0.5)
    assert not m.violated(1e-12)


def test_margins_update_on_upper_bound():
    # first-order update of cell 1 lands exactly on 1
    m = compute_margins_1d(np.array([0.0, 0.5, 0.0]), np.array([0.0, 0.25, -0.25, 0.0]),
                           1.0, 0.0, 1.0)
    assert m.gamma_M[1] == 0.0


def test_margins_upwind_bump():
    u = np.array([0.0, 1.0, 0.0])
    h = np.array([u[2], u[0], u[1], u[2]])  # upwind for f(u) = u, periodic
    m = compute_margins_1d(u, h, 0.5, 0.0, 1.0)
    np.testing.assert_allclose(m.gamma_M, [1.0, 0.5, 0.5])
    np.testing.assert_allclose(m.gamma_m, [0.0, -0.5, -0.5])


def test_margin_diagnostic_warns():
    with pytest.warns(RuntimeWarning):
        compute_margins(np.zeros(2), np.array([1.5, 0.2]), 0.0, 1.0, warn=True)


def test_clamp_margins():
    m = clamp_margins(Margins(np.array([-1e-14, 0.3]), np.array([1e-14, -0.1]), 1e-14), 1e-12)
    np.testing.assert_array_equal(m.gamma_M, [0.0, 0.3])
    np.testing.assert_array_equal(m.gamma_m, [0.0, -0.1])


def _max_ok(tl, tr, Fl, Fr, g, lam):
    return lam * tl * Fl - lam * tr * Fr <= g + 1e-14


def _min_ok(tl, tr, Fl, Fr, g, lam):
    return lam * tl * Fl - lam * tr * Fr >= g - 1e-14


def test_limit_max_case_a():
    assert limit_max_1d(-1.0, 2.0, 0.1, 1.0) == (1.0, 1.0)


def test_limit_max_case_b_bruteforce():
    Ll, Lr = limit_max_1d(-1.0, -2.0, 0.5, 0.5)
    assert (Ll, Lr) == pytest.approx((1.0, 0.5))
    # worst corner of the box is theta_l = 0
    assert _max_ok(0.0, 0.5, -1.0, -2.0, 0.5, 0.5)
    assert not _max_ok(0.0, 0.6, -1.0, -2.0, 0.5, 0.5)


def test_limit_max_case_d_saturates():
    assert limit_max_1d(1.0, -1.0, 0.4, 0.2) == pytest.approx((1.0, 1.0))


def test_limit_max_case_c():
    assert limit_max_1d(2.0, 1.0, 0.5, 0.5) == pytest.approx((0.5, 1.0))


def test_limit_min_examples():
    assert limit_min_1d(1.0, -1.0, -0.1, 1.0) == (1.0, 1.0)
    assert limit_min_1d(1.0, 2.0, -0.3, 0.1) == pytest.approx((1.0, 1.0))
    Ll, Lr = limit_min_1d(-2.0, 1.0, -0.3, 0.5)
    assert (Ll, Lr) == pytest.approx((0.2, 0.2))
    assert _min_ok(0.2, 0.2, -2.0, 1.0, -0.3, 0.5)
    assert not _min_ok(0.21, 0.21, -2.0, 1.0, -0.3, 0.5)


@pytest.mark.parametrize("Fl,Fr", list(itertools.product([-1.5, -0.3, 0.0, 0.4, 2.0], repeat=2)))
def test_limit_box_is_safe(Fl, Fr):
    lam, gM, gm = 0.7, 0.2, -0.15
    aM, bM = limit_max_1d(Fl, Fr, gM, lam)
    am, bm = limit_min_1d(Fl, Fr, gm, lam)
    grid = np.linspace(0, 1, 21)
    for sl in grid:
        for sr in grid:
            tl, tr = sl * min(aM, am), sr * min(bM, bm)
            assert _max_ok(tl, tr, Fl, Fr, gM, lam)
            assert _min_ok(tl, tr, Fl, Fr, gm, lam)


def test_limit_zero_margin_zero_flux():
    # no harmful flux: nothing to limit even when the margin is zero
    assert limit_max_1d(0.0, 0.0, 0.0, 1.0) == (1.0, 1.0)
    assert limit_min_1d(0.0, 0.0, 0.0, 1.0) == (1.0, 1.0)


def test_limit_vectorized_matches_scalar():
    rng = np.random.default_rng(3)
    Fl, Fr = rng.normal(size=50), rng.normal(size=50)
    g = rng.uniform(0, 0.5, 50)
    Ll, Lr = limit_max_1d(Fl, Fr, g, 0.4)
    for i in range(50):
        assert (Ll[i], Lr[i]) == pytest.approx(limit_max_1d(Fl[i], Fr[i], g[i], 0.4))


def test_combine_theta_examples():
    np.testing.assert_array_equal(combine_theta_1d(np.ones(4), np.ones(4)), np.ones(5))
    # cell 1 caps its right interface (2) at 0.5; cell 2 caps its left at 0.7
    left = np.array([1.0, 1.0, 0.7, 1.0])
    right = np.array([1.0, 0.5, 1.0, 1.0])
    theta = combine_theta_1d(left, right)
    assert theta[2] == 0.5


def test_combine_theta_bounded_by_contributors():
    rng = np.random.default_rng(0)
    left, right = rng.uniform(size=30), rng.uniform(size=30)
    theta = combine_theta_1d(left, right, periodic=False)
    assert np.all(theta[:-1] <= left) and np.all(theta[1:] <= right)
    periodic = combine_theta_1d(left, right)
    assert periodic[0] == periodic[-1] == min(left[0], right[-1])


def test_limit_cell_2d_example_bruteforce():
    F = np.array([0.2, 0.3, 0.0, -0.1])
    L = limit_cell_2d(F, 0.25, -1.0)
    np.testing.assert_allclose(L, [0.5, 0.5, 1.0, 1.0])
    steps = np.linspace(0, 1, 101)
    # inside the box: worst case uses the caps on the positive edges and no negative help
    for a in steps:
        for b in steps:
            s = a * 0.5 * 0.2 + b * 0.5 * 0.3
            assert s <= 0.25 + 1e-14
    # just outside the box on a positive edge the constraint fails
    assert 0.51 * 0.2 + 0.5 * 0.3 > 0.25


def test_limit_cell_2d_reductions():
    np.testing.assert_array_equal(limit_cell_2d(np.array([-0.1, 0.0, -0.3, -0.2]), 0.0, -5.0), 1.0)
    L = limit_cell_2d(np.array([0.8, 0.0, -0.1, 0.0]), 0.2, -1.0)
    assert L[0] == pytest.approx(0.25)


def test_limit_2d_reduces_to_1d_rows():
    rng = np.random.default_rng(7)
    nx, ny, lam = 12, 5, 0.45
    F1 = rng.normal(size=nx + 1)
    F1[-1] = F1[0]
    gM1, gm1 = rng.uniform(0, 0.3, nx), -rng.uniform(0, 0.3, nx)
    theta1 = limit_1d(F1, Margins(gM1, gm1, 0.0), lam)
    m2 = Margins(np.tile(gM1, (ny, 1)), np.tile(gm1, (ny, 1)), 0.0)
    tx, ty = limit_2d(np.tile(F1, (ny, 1)), np.zeros((ny + 1, nx)), m2, lam, 0.3)
    np.testing.assert_allclose(tx, np.tile(theta1, (ny, 1)), atol=1e-13)
    assert np.all(ty == 1.0)


def test_apply_limited_update_extremes():
    rng = np.random.default_rng(1)
    u = rng.uniform(size=6)
    H, h = rng.normal(size=7), rng.normal(size=7)
    lam = 0.3
    np.testing.assert_array_equal(apply_limited_update(u, H, h, np.zeros(7), lam),
                                  u - lam * (h[1:] - h[:-1]))
    np.testing.assert_array_equal(apply_limited_update(u, H, h, np.ones(7), lam),
                                  u - lam * (H[1:] - H[:-1]))


def test_check_bounds_raises():
    check_bounds(np.array([0.0, 1.0 + 1e-13]), 0.0, 1.0)
    with pytest.raises(BoundViolation):
        check_bounds(np.array([-1e-9, 0.5]), 0.0, 1.0)
    with pytest.raises(BoundViolation):
        apply_limited_update(np.array([1.0, 0.0]), np.array([0.0, -1.0, 0.0]),
                             np.zeros(3), np.ones(3), 1.0, bounds=(0.0, 1.0))


def test_bound_tolerance_scale():
    assert bound_tolerance(0.0, 1.0) == 1e-12
    assert bound_tolerance(-5.0, 2.0) == pytest.approx(5e-12)


def test_step_advection_limited():
    p = make_problem("linear_1d")
    n = 40
    g = Grid1D(*p.domain, n)
    u = np.where(np.arange(n) < n // 2, 0.0, 1.0)
    op = Operator1D(p, g, ReconScheme(2))
    lam = 0.5
    H, h = op.high(u), op.low(u)
    free = u - lam * (H[1:] - H[:-1])
    assert free.max() > 1 + 1e-6
    m = clamp_margins(compute_margins_1d(u, h, lam, 0.0, 1.0), 1e-12)
    theta = limit_1d(H - h, m, lam)
    assert cell_inequalities_hold(theta[:-1], theta[1:], (H - h)[:-1], (H - h)[1:],
                                  m.gamma_M, m.gamma_m, lam)
    new = apply_limited_update(u, H, h, theta, lam, bounds=(0.0, 1.0))
    assert new.max() <= 1 + 1e-12 and new.min() >= -1e-12
    assert new.sum() == pytest.approx(u.sum(), rel=1e-13)


def test_theta_one_on_smooth_interior_data():
    p = make_problem("linear_1d")
    g = Grid1D(*p.domain, 32)
    u = 0.5 + 0.1 * project_cell_averages(np.sin, g).values
    op = Operator1D(p, g, ReconScheme(2))
    H, h = op.high(u), op.low(u)
    m = compute_margins_1d(u, h, 0.4, 0.0, 1.0)
    assert np.all(limit_1d(H - h, m, 0.4) == 1.0)
