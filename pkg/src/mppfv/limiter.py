"""Parametrized maximum-principle-preserving flux limiter (1D and 2D)."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

TINY = 1e-300


class BoundViolation(RuntimeError):
    """Limited update left the invariant range; indicates a bug or a bad time step."""


class MarginViolation(RuntimeError):
    """First-order update already violates the bounds beyond tolerance."""


def bound_tolerance(u_m: float, u_M: float) -> float:
    return 1e-12 * max(1.0, abs(u_M), abs(u_m))


@dataclass
class Margins:
    gamma_M: np.ndarray
    gamma_m: np.ndarray
    worst: float  # most negative gamma_M or most positive -gamma_m (<= 0 is fine)

    def violated(self, tol: float) -> bool:
        return self.worst > tol


def compute_margins(ubar, first_order_update, u_m: float, u_M: float, warn: bool = False) -> Margins:
    """Gamma^M = u_M - u^FO and Gamma^m = u_m - u^FO, where u^FO is the first-order update.

    ``first_order_update`` is the forward-Euler first-order cell value
    ubar - lambda * (h_{j+1/2} - h_{j-1/2}) (any dimension).
    """
    gM = u_M - first_order_update
    gm = u_m - first_order_update
    worst = max(float(-gM.min()), float(gm.max()))
    if warn and worst > bound_tolerance(u_m, u_M):
        warnings.warn(f"first-order update leaves the bounds by {worst:.3e}", RuntimeWarning)
    return Margins(gM, gm, worst)


def compute_margins_1d(ubar, h_low, lam: float, u_m: float, u_M: float, warn: bool = False) -> Margins:
    ubar = np.asarray(ubar, dtype=float)
    h_low = np.asarray(h_low, dtype=float)
    return compute_margins(ubar, ubar - lam * (h_low[1:] - h_low[:-1]), u_m, u_M, warn)


def clamp_margins(m: Margins, tol: float) -> Margins:
    """Clamp margins of the wrong sign that are within ``tol`` to zero."""
    return Margins(np.maximum(m.gamma_M, 0.0), np.minimum(m.gamma_m, 0.0), m.worst)


def _ratio(num, den):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.minimum(1.0, np.where(den != 0, num / np.where(den != 0, den, 1.0), 1.0))


def limit_max_1d(F_left, F_right, gamma_M, lam):
    """Caps (Lambda_left, Lambda_right) so that lam*(th_l*F_l - th_r*F_r) <= Gamma^M."""
    Fl = np.asarray(F_left, dtype=float)
    Fr = np.asarray(F_right, dtype=float)
    gM = np.maximum(np.asarray(gamma_M, dtype=float), 0.0)
    pos_l = lam * Fl > TINY  # harmful: positive left flux difference
    neg_r = lam * Fr < -TINY  # harmful: negative right flux difference
    both = _ratio(gM, lam * Fl - lam * Fr)
    only_l = _ratio(gM, lam * Fl)
    only_r = _ratio(gM, -lam * Fr)
    Ll = np.where(pos_l & neg_r, both, np.where(pos_l, only_l, 1.0))
    Lr = np.where(pos_l & neg_r, both, np.where(neg_r, only_r, 1.0))
    return _out(Ll), _out(Lr)


def limit_min_1d(F_left, F_right, gamma_m, lam):
    """Caps so that lam*(th_l*F_l - th_r*F_r) >= Gamma^m."""
    Fl = np.asarray(F_left, dtype=float)
    Fr = np.asarray(F_right, dtype=float)
    gm = np.minimum(np.asarray(gamma_m, dtype=float), 0.0)
    neg_l = lam * Fl < -TINY
    pos_r = lam * Fr > TINY
    both = _ratio(gm, lam * Fl - lam * Fr)
    only_l = _ratio(gm, lam * Fl)
    only_r = _ratio(gm, -lam * Fr)
    Ll = np.where(neg_l & pos_r, both, np.where(neg_l, only_l, 1.0))
    Lr = np.where(neg_l & pos_r, both, np.where(pos_r, only_r, 1.0))
    return _out(Ll), _out(Lr)


def _out(a):
    a = np.clip(a, 0.0, 1.0)
    return a if a.ndim else float(a)


def combine_theta_1d(lam_left, lam_right, periodic: bool = True) -> np.ndarray:
    """theta on the n+1 interfaces from per-cell caps on their left/right interfaces.

    ``lam_left[j]`` caps interface j (left edge of cell j) and ``lam_right[j]``
    caps interface j+1.  Each argument is already the min over the max and
    min constraints.  Periodic grids identify interfaces 0 and n.
    """
    lam_left = np.asarray(lam_left, dtype=float)
    lam_right = np.asarray(lam_right, dtype=float)
    n = lam_left.size
    theta = np.ones(n + 1)
    theta[:-1] = np.minimum(theta[:-1], lam_left)
    theta[1:] = np.minimum(theta[1:], lam_right)
    if periodic:
        theta[0] = theta[n] = min(theta[0], theta[n])
    return theta


def limit_1d(F, margins: Margins, lam: float, periodic: bool = True) -> np.ndarray:
    Fl, Fr = F[:-1], F[1:]
    aM, bM = limit_max_1d(Fl, Fr, margins.gamma_M, lam)
    am, bm = limit_min_1d(Fl, Fr, margins.gamma_m, lam)
    return combine_theta_1d(np.minimum(aM, am), np.minimum(bM, bm), periodic)


def limit_cell_2d(F4, gamma_M, gamma_m):
    """Per-cell caps for the four signed contributions (L, R, D, U), last axis = 4.

    Constraint per cell: Gamma^m <= sum(theta * F) <= Gamma^M.  Positive
    contributions share Gamma^M in proportion; negative ones share Gamma^m.
    """
    F4 = np.asarray(F4, dtype=float)
    gM = np.maximum(np.asarray(gamma_M, dtype=float), 0.0)[..., None]
    gm = np.minimum(np.asarray(gamma_m, dtype=float), 0.0)[..., None]
    pos = F4 > TINY
    neg = F4 < -TINY
    S = np.sum(np.where(pos, F4, 0.0), axis=-1, keepdims=True)
    N = np.sum(np.where(neg, F4, 0.0), axis=-1, keepdims=True)
    LM = np.where(pos, _ratio(gM, S), 1.0)
    Lm = np.where(neg, _ratio(gm, N), 1.0)
    return np.clip(np.minimum(LM, Lm), 0.0, 1.0)


def limit_2d(Fx, Fy, margins: Margins, lam_x: float, lam_y: float,
             periodic=(True, True)):
    """theta on x-edges (ny, nx+1) and y-edges (ny+1, nx) from flux differences Fx, Fy.

    Fx = H^rk - h on x-edges, Fy likewise; the signed per-cell contributions
    are +lam_x*F on the left edge, -lam_x*F on the right edge, and the same in y.
    """
    F4 = np.stack([lam_x * Fx[:, :-1], -lam_x * Fx[:, 1:],
                   lam_y * Fy[:-1, :], -lam_y * Fy[1:, :]], axis=-1)
    L = limit_cell_2d(F4, margins.gamma_M, margins.gamma_m)
    ny, nx = margins.gamma_M.shape
    tx = np.ones((ny, nx + 1))
    tx[:, :-1] = np.minimum(tx[:, :-1], L[..., 0])
    tx[:, 1:] = np.minimum(tx[:, 1:], L[..., 1])
    ty = np.ones((ny + 1, nx))
    ty[:-1, :] = np.minimum(ty[:-1, :], L[..., 2])
    ty[1:, :] = np.minimum(ty[1:, :], L[..., 3])
    if periodic[0]:
        m = np.minimum(tx[:, 0], tx[:, -1])
        tx[:, 0] = tx[:, -1] = m
    if periodic[1]:
        m = np.minimum(ty[0], ty[-1])
        ty[0] = ty[-1] = m
    return tx, ty


def blend(theta, h_high, h_low):
    """H~ = theta*H + (1-theta)*h; theta = 1 gives H and theta = 0 gives h exactly."""
    return theta * h_high + (1.0 - theta) * h_low


def apply_limited_update(ubar, h_high, h_low, theta, lam, bounds=None):
    """1D limited conservative update; checks the bounds when ``bounds`` is given."""
    Ht = blend(theta, h_high, h_low)
    new = ubar - lam * (Ht[1:] - Ht[:-1])
    if bounds is not None:
        check_bounds(new, *bounds)
    return new


def check_bounds(values, u_m: float, u_M: float):
    tol = bound_tolerance(u_m, u_M)
    lo, hi = float(values.min()), float(values.max())
    if lo < u_m - tol or hi > u_M + tol:
        raise BoundViolation(f"limited update in [{lo!r}, {hi!r}] leaves [{u_m}, {u_M}]")


def cell_inequalities_hold(theta_l, theta_r, F_l, F_r, gamma_M, gamma_m, lam, tol=1e-14):
    """Direct check of the limited 1D cell inequalities (used in debug mode and tests)."""
    s = lam * theta_l * F_l - lam * theta_r * F_r
    scale = 1.0 + np.abs(lam * F_l) + np.abs(lam * F_r)
    return bool(np.all(s <= np.maximum(gamma_M, 0) + tol * scale) and
                np.all(s >= np.minimum(gamma_m, 0) - tol * scale))
