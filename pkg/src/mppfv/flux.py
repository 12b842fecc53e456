"""Monotone fluxes and the high/low order interface flux assembly in 1D and 2D.

Flux arrays follow one convention throughout: in 1D an array of length n+1
whose entry i lives on the left edge of cell i; in 2D a pair
``(Hx, Hy)`` with ``Hx.shape == (ny, nx+1)`` and ``Hy.shape == (ny+1, nx)``.
Every flux is the total flux H = H^C - H^D, so the semi-discrete operator is
minus its divergence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .elliptic import SpectralPlan, analytic_edge_velocity, velocities_from_psi
from .grid import CellField, Grid1D, Grid2D, pad
from .reconstruct import (ReconScheme, compact_diffusion_fluxes, gauss_nodes,
                          interface_values, recon_line_averages_y)

SAMPLES = 10001


@dataclass(frozen=True)
class MonotoneFluxKind:
    kind: str = "lf"  # lf | godunov | overdiffusive
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in ("lf", "godunov", "overdiffusive"):
            raise ValueError(f"unknown monotone flux {self.kind!r}")
        if self.kind == "overdiffusive" and self.alpha is not None and not self.alpha > 1:
            raise ValueError("over-diffusive flux needs alpha > 1")


def max_abs_derivative(df, lo: float, hi: float, samples: int = SAMPLES) -> float:
    """max |df| over [lo, hi] by dense sampling (endpoints included)."""
    if hi < lo:
        lo, hi = hi, lo
    u = np.linspace(lo, hi, samples)
    return float(np.max(np.abs(df(u))))


# scalar monotone fluxes -----------------------------------------------------

def lax_friedrichs(u_minus, u_plus, f, alpha):
    return 0.5 * (f(u_minus) + alpha * u_minus) + 0.5 * (f(u_plus) - alpha * u_plus)


def over_diffusive_lf(u_minus, u_plus, alpha):
    return 0.5 * ((1 + alpha) * u_minus + (1 - alpha) * u_plus)


def flux_extrema(f, lo: float, hi: float, samples: int = 2001) -> np.ndarray:
    """Interior local extrema of f on [lo, hi], refined with a bounded Brent search."""
    if hi <= lo:
        return np.empty(0)
    u = np.linspace(lo, hi, samples)
    fu = np.asarray(f(u), dtype=float)
    d = np.diff(fu)
    out = []
    for i in range(1, len(d)):
        if d[i - 1] * d[i] < 0 or (d[i - 1] != 0 and d[i] == 0):
            sign = 1.0 if d[i - 1] < 0 else -1.0  # +1: local min
            res = minimize_scalar(lambda s: sign * float(f(np.asarray(s))),
                                  bounds=(u[i - 1], u[i + 1]), method="bounded",
                                  options={"xatol": 1e-14})
            out.append(res.x)
    return np.array(out)


def godunov(u_minus, u_plus, f, extrema=None):
    """Exact Riemann flux: min of f on [u-, u+] if u- <= u+, else max on [u+, u-]."""
    um = np.asarray(u_minus, dtype=float)
    up = np.asarray(u_plus, dtype=float)
    if extrema is None:
        lo = float(np.minimum(um, up).min())
        hi = float(np.maximum(um, up).max())
        extrema = flux_extrema(f, lo, hi)
    fm, fp = f(um), f(up)
    lo_v = np.minimum(fm, fp)
    hi_v = np.maximum(fm, fp)
    a, b = np.minimum(um, up), np.maximum(um, up)
    for c in np.atleast_1d(extrema):
        inside = (a <= c) & (c <= b)
        fc = float(f(np.asarray(c)))
        lo_v = np.where(inside, np.minimum(lo_v, fc), lo_v)
        hi_v = np.where(inside, np.maximum(hi_v, fc), hi_v)
    out = np.where(um <= up, lo_v, hi_v)
    return out if out.ndim else float(out)


def low_convection(uL, uR, f, kind: MonotoneFluxKind, alpha, extrema=None):
    if kind.kind == "lf":
        return lax_friedrichs(uL, uR, f, alpha)
    if kind.kind == "overdiffusive":
        return over_diffusive_lf(uL, uR, alpha)
    return godunov(uL, uR, f, extrema)


# operators ------------------------------------------------------------------

def _monotone_kind(problem, override: MonotoneFluxKind | None) -> MonotoneFluxKind:
    if override is not None:
        return override
    return MonotoneFluxKind(problem.low_flux, problem.low_alpha)


class Operator1D:
    """High- and first-order interface fluxes for a 1D problem."""

    def __init__(self, problem, grid: Grid1D, scheme: ReconScheme,
                 low_kind: MonotoneFluxKind | None = None):
        self.problem = problem
        self.grid = grid
        self.scheme = scheme
        self.bc = problem.bc
        self.width = max(scheme.k + 1, 2)
        self.low_kind = _monotone_kind(problem, low_kind)
        lo, hi = problem.bounds
        self.set_range(lo, hi)

    def set_range(self, lo: float, hi: float):
        """Freeze LF viscosities and Godunov extrema for the state range [lo, hi]."""
        p = self.problem
        sampled = max_abs_derivative(p.df, lo, hi) if p.has_convection else 0.0
        self.alpha = p.lf_alpha if p.lf_alpha is not None else sampled
        self.alpha_low = self.low_kind.alpha if self.low_kind.alpha is not None else self.alpha
        self.extrema = flux_extrema(p.f, lo, hi) if self.low_kind.kind == "godunov" else None

    def high_convection(self, u, t=0.0):
        ue = pad(u, self.width, self.bc)
        um, up = interface_values(ue, self.width, self.grid.n, self.scheme)
        return lax_friedrichs(um, up, self.problem.f, self.alpha)

    def high_diffusion(self, u, t=0.0):
        ue = pad(u, self.width, self.bc)
        return compact_diffusion_fluxes(ue, self.width, self.grid.n, self.problem.a, self.grid.dx)

    def high(self, u, t=0.0):
        ue = pad(u, self.width, self.bc)
        n, p = self.grid.n, self.problem
        H = np.zeros(n + 1)
        if p.has_convection:
            um, up = interface_values(ue, self.width, n, self.scheme)
            H += lax_friedrichs(um, up, p.f, self.alpha)
        if p.has_diffusion:
            H -= compact_diffusion_fluxes(ue, self.width, n, p.a, self.grid.dx)
        return H

    def low(self, u, t=0.0):
        ue = pad(u, 1, self.bc)
        uL, uR = ue[:-1], ue[1:]
        p = self.problem
        h = np.zeros(self.grid.n + 1)
        if p.has_convection:
            h += low_convection(uL, uR, p.f, self.low_kind, self.alpha_low, self.extrema)
        if p.has_diffusion:
            h -= (p.a(uR) - p.a(uL)) / self.grid.dx
        return h

    def divergence(self, H):
        return (H[1:] - H[:-1]) / self.grid.dx


class Operator2D:
    """High- and first-order edge fluxes for a 2D problem (Gauss quadrature on edges)."""

    def __init__(self, problem, grid: Grid2D, scheme: ReconScheme,
                 low_kind: MonotoneFluxKind | None = None):
        self.problem = problem
        self.grid = grid
        self.scheme = scheme
        self.bc = problem.bc
        self.width = max(scheme.k + 1, 2)
        self.nodes, self.weights = gauss_nodes(scheme.k)
        self.low_kind = _monotone_kind(problem, low_kind)
        self.plan = SpectralPlan(grid) if (problem.velocity and problem.velocity.from_vorticity) else None
        self._vcache = None
        lo, hi = problem.bounds
        self.set_range(lo, hi)

    def set_range(self, lo: float, hi: float):
        p = self.problem
        if p.incompressible or not p.has_convection:
            self.alpha_x = self.alpha_y = 0.0
        else:
            self.alpha_x = p.lf_alpha if p.lf_alpha is not None else max_abs_derivative(p.df, lo, hi)
            self.alpha_y = p.lf_alpha if p.lf_alpha is not None else max_abs_derivative(p.dg, lo, hi)
        la = self.low_kind.alpha
        self.alpha_low_x = la if la is not None else self.alpha_x
        self.alpha_low_y = la if la is not None else self.alpha_y
        if self.low_kind.kind == "godunov" and not p.incompressible:
            self.extrema_x = flux_extrema(p.f, lo, hi)
            self.extrema_y = flux_extrema(p.g, lo, hi)
        else:
            self.extrema_x = self.extrema_y = None

    # velocity for incompressible problems
    def edge_velocity(self, u, t):
        c = self._vcache
        if c is not None and c[0] is u and c[1] == t:
            return c[2]
        vel = self.problem.velocity
        if vel.from_vorticity:
            data = velocities_from_psi(self.plan.psi_hat(u), self.plan, self.nodes)
        else:
            data = analytic_edge_velocity(vel, self.grid, t, self.nodes)
        self._vcache = (u, t, data)
        return data

    def _gauss_sum(self, a):
        return 0.5 * np.tensordot(self.weights, a, axes=1)

    def high(self, u, t=0.0):
        g, p, W, k = self.grid, self.problem, self.width, self.scheme.k
        ue = pad(u, W, self.bc)
        # x-edges: line averages at y Gauss nodes, then reconstruct along x
        lx = recon_line_averages_y(ue, W, g.ny, k)  # (G, ny, nx+2W)
        # y-edges: the same with the roles of x and y exchanged
        ly = recon_line_averages_y(ue.T, W, g.nx, k)  # (G, nx, ny+2W)
        Hx = np.zeros((g.ny, g.nx + 1))
        Hy = np.zeros((g.nx, g.ny + 1))
        if p.has_convection:
            umx, upx = interface_values(lx, W, g.nx, self.scheme)
            umy, upy = interface_values(ly, W, g.ny, self.scheme)
            if p.incompressible:
                ev = self.edge_velocity(u, t)
                un = ev.un_x
                vn = np.swapaxes(ev.vn_y, 1, 2)
                Hx += self._gauss_sum(np.maximum(un, 0) * umx + np.minimum(un, 0) * upx)
                Hy += self._gauss_sum(np.maximum(vn, 0) * umy + np.minimum(vn, 0) * upy)
            else:
                Hx += self._gauss_sum(lax_friedrichs(umx, upx, p.f, self.alpha_x))
                Hy += self._gauss_sum(lax_friedrichs(umy, upy, p.g, self.alpha_y))
        if p.has_diffusion:
            Hx -= self._gauss_sum(compact_diffusion_fluxes(lx, W, g.nx, p.a, g.dx))
            Hy -= self._gauss_sum(compact_diffusion_fluxes(ly, W, g.ny, p.b, g.dy))
        return Hx, Hy.T

    def low(self, u, t=0.0):
        g, p = self.grid, self.problem
        ue = pad(u, 1, self.bc)
        xL, xR = ue[1:-1, :-1], ue[1:-1, 1:]
        yD, yU = ue[:-1, 1:-1], ue[1:, 1:-1]
        hx = np.zeros((g.ny, g.nx + 1))
        hy = np.zeros((g.ny + 1, g.nx))
        if p.has_convection:
            if p.incompressible:
                U, V = self.edge_velocity(u, t).first_order_edge_velocities(g)
                hx += np.maximum(U, 0) * xL + np.minimum(U, 0) * xR
                hy += np.maximum(V, 0) * yD + np.minimum(V, 0) * yU
            else:
                hx += low_convection(xL, xR, p.f, self.low_kind, self.alpha_low_x, self.extrema_x)
                hy += low_convection(yD, yU, p.g, self.low_kind, self.alpha_low_y, self.extrema_y)
        if p.has_diffusion:
            hx -= (p.a(xR) - p.a(xL)) / g.dx
            hy -= (p.b(yU) - p.b(yD)) / g.dy
        return hx, hy

    def divergence(self, H):
        Hx, Hy = H
        return (Hx[:, 1:] - Hx[:, :-1]) / self.grid.dx + (Hy[1:] - Hy[:-1]) / self.grid.dy


def make_operator(problem, grid, scheme: ReconScheme, low_kind=None):
    if problem.dim == 1:
        return Operator1D(problem, grid, scheme, low_kind)
    return Operator2D(problem, grid, scheme, low_kind)


# convenience wrappers -----------------------------------------------------

def first_order_combined_flux_1d(field: CellField, problem, dx: float | None = None,
                                 low_kind: MonotoneFluxKind | None = None):
    op = Operator1D(problem, field.grid, ReconScheme(2), low_kind)
    return op.low(field.values)


def high_order_convection_flux_1d(field: CellField, problem, scheme: ReconScheme):
    return Operator1D(problem, field.grid, scheme).high_convection(field.values)


def high_order_diffusion_flux_1d(field: CellField, problem, dx: float | None = None):
    return Operator1D(problem, field.grid, ReconScheme(2)).high_diffusion(field.values)


def edge_fluxes_2d(field: CellField, problem, scheme: ReconScheme, t: float = 0.0):
    return Operator2D(problem, field.grid, scheme).high(field.values, t)


def incompressible_edge_fluxes(field: CellField, problem, scheme: ReconScheme,
                               t: float = 0.0, order: str = "high"):
    op = Operator2D(problem, field.grid, scheme)
    return op.high(field.values, t) if order == "high" else op.low(field.values, t)
