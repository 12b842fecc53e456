"""Spectral Poisson solve on doubly periodic grids and the derived velocities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import CellField, Grid2D


class SpectralPlan:
    def __init__(self, grid: Grid2D):
        self.grid = grid
        self.nx, self.ny = grid.nx, grid.ny
        self.kx = 2 * np.pi * np.fft.fftfreq(grid.nx, d=grid.dx)
        self.ky = 2 * np.pi * np.fft.fftfreq(grid.ny, d=grid.dy)
        KX, KY = np.meshgrid(self.kx, self.ky)
        self.k2 = KX ** 2 + KY ** 2
        # cell-average -> point-value deconvolution
        sx = np.sinc(self.kx * grid.dx / (2 * np.pi))
        sy = np.sinc(self.ky * grid.dy / (2 * np.pi))
        self.smear = sy[:, None] * sx[None, :]
        # odd derivatives and off-grid shifts drop the Nyquist modes
        keep_x = np.ones(grid.nx, bool)
        keep_y = np.ones(grid.ny, bool)
        if grid.nx % 2 == 0:
            keep_x[grid.nx // 2] = False
        if grid.ny % 2 == 0:
            keep_y[grid.ny // 2] = False
        self.keep = keep_y[:, None] & keep_x[None, :]

    def psi_hat(self, omega: np.ndarray, averages: bool = True) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        scale = max(float(np.abs(omega).max()), 1e-300)
        if abs(float(omega.mean())) > 1e-10 * scale:
            raise ValueError("vorticity has nonzero mean; periodic Poisson problem is incompatible")
        w = np.fft.fft2(omega)
        if averages:
            w = w / self.smear
        with np.errstate(divide="ignore", invalid="ignore"):
            ph = np.where(self.k2 > 0, -w / self.k2, 0.0)
        ph[0, 0] = 0.0
        return ph

    def shifted(self, hat: np.ndarray, sx: float, sy: float) -> np.ndarray:
        """Values at (x_c + sx, y_c + sy) for every cell center."""
        if sx == 0.0 and sy == 0.0:
            return np.real(np.fft.ifft2(hat))
        phase = np.exp(1j * (self.ky[:, None] * sy + self.kx[None, :] * sx))
        return np.real(np.fft.ifft2(np.where(self.keep, hat * phase, 0.0)))

    def laplacian(self, hat: np.ndarray) -> np.ndarray:
        return np.real(np.fft.ifft2(-self.k2 * hat))

    def corners(self, hat: np.ndarray) -> np.ndarray:
        """Values at all (ny+1, nx+1) cell corners, periodic wrap included."""
        g = self.grid
        inner = self.shifted(hat, -0.5 * g.dx, -0.5 * g.dy)
        out = np.empty((self.ny + 1, self.nx + 1))
        out[:-1, :-1] = inner
        out[-1, :-1] = inner[0]
        out[:-1, -1] = inner[:, 0]
        out[-1, -1] = inner[0, 0]
        return out


def solve_poisson_periodic(omega: CellField, plan: SpectralPlan | None = None,
                           averages: bool = True) -> np.ndarray:
    """psi with Laplacian(psi) = omega, sampled at the cell corners."""
    plan = plan or SpectralPlan(omega.grid)
    return plan.corners(plan.psi_hat(omega.values, averages))


@dataclass
class EdgeVelocity:
    """Normal velocities on Gauss nodes of every edge plus corner streamfunction.

    ``un_x`` has shape (G, ny, nx+1): u at (x_{i-1/2}, y_j + dy*xi_g).
    ``vn_y`` has shape (G, ny+1, nx): v at (x_i + dx*xi_g, y_{j-1/2}).
    ``psi`` has shape (ny+1, nx+1).
    """

    un_x: np.ndarray
    vn_y: np.ndarray
    psi: np.ndarray

    def max_speeds(self, grid: Grid2D | None = None):
        """Largest |u| and |v| over the Gauss nodes; with ``grid`` also over the
        first-order edge velocities, which set the monotone-flux time step."""
        sx, sy = float(np.abs(self.un_x).max()), float(np.abs(self.vn_y).max())
        if grid is not None:
            U, V = self.first_order_edge_velocities(grid)
            sx, sy = max(sx, float(np.abs(U).max())), max(sy, float(np.abs(V).max()))
        return sx, sy

    def first_order_edge_velocities(self, grid: Grid2D):
        U = -(self.psi[1:, :] - self.psi[:-1, :]) / grid.dy
        V = (self.psi[:, 1:] - self.psi[:, :-1]) / grid.dx
        return U, V


def _wrap_x(a):
    return np.concatenate([a, a[..., :1]], axis=-1)


def _wrap_y(a):
    return np.concatenate([a, a[..., :1, :]], axis=-2)


def velocities_from_psi(psi_hat: np.ndarray, plan: SpectralPlan, nodes) -> EdgeVelocity:
    """Spectral u = -psi_y, v = psi_x at edge Gauss nodes; corner psi for the low-order flux."""
    g = plan.grid
    uh = np.where(plan.keep, -1j * plan.ky[:, None] * psi_hat, 0.0)
    vh = np.where(plan.keep, 1j * plan.kx[None, :] * psi_hat, 0.0)
    un = np.stack([_wrap_x(plan.shifted(uh, -0.5 * g.dx, xi * g.dy)) for xi in nodes])
    vn = np.stack([_wrap_y(plan.shifted(vh, xi * g.dx, -0.5 * g.dy)) for xi in nodes])
    return EdgeVelocity(un, vn, plan.corners(psi_hat))


def analytic_edge_velocity(velocity, grid: Grid2D, t: float, nodes) -> EdgeVelocity:
    nodes = np.asarray(nodes)
    yq = grid.yc[None, :, None] + grid.dy * nodes[:, None, None]
    xq = grid.xc[None, None, :] + grid.dx * nodes[:, None, None]
    xf = grid.xf[None, None, :]
    yf = grid.yf[None, :, None]
    un = np.broadcast_to(velocity.u(xf, yq, t), (len(nodes), grid.ny, grid.nx + 1))
    vn = np.broadcast_to(velocity.v(xq, yf, t), (len(nodes), grid.ny + 1, grid.nx))
    psi = np.broadcast_to(velocity.psi(grid.xf[None, :], grid.yf[:, None], t),
                          (grid.ny + 1, grid.nx + 1))
    return EdgeVelocity(np.array(un, float), np.array(vn, float), np.array(psi, float))
