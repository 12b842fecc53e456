"""Uniform structured grids, cell-average fields and ghost-cell padding.

2D values are stored as arrays of shape ``(ny, nx)``: the x index is the fast
(last) axis, so ``values[j, i]`` is the average over cell ``I_{i,j}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np


@dataclass(frozen=True)
class Periodic:
    pass


@dataclass(frozen=True)
class Dirichlet:
    """Constant boundary value copied into every ghost layer on its side."""

    value: float


Side = Union[Periodic, Dirichlet]


@dataclass(frozen=True)
class BoundaryCondition:
    """Boundary condition per domain side.

    ``bottom``/``top`` are only used by 2D grids.
    """

    left: Side = Periodic()
    right: Side = Periodic()
    bottom: Side | None = None
    top: Side | None = None

    def __post_init__(self):
        pairs = [(self.left, self.right)]
        if self.bottom is not None or self.top is not None:
            pairs.append((self.bottom, self.top))
        for lo, hi in pairs:
            if isinstance(lo, Periodic) != isinstance(hi, Periodic):
                raise ValueError("periodic sides must come in opposite pairs")

    @classmethod
    def periodic(cls, dim: int = 1) -> "BoundaryCondition":
        if dim == 1:
            return cls(Periodic(), Periodic())
        return cls(Periodic(), Periodic(), Periodic(), Periodic())

    @classmethod
    def dirichlet(cls, left: float, right: float) -> "BoundaryCondition":
        return cls(Dirichlet(left), Dirichlet(right))

    def axis(self, axis: str) -> tuple[Side, Side]:
        if axis == "x":
            return self.left, self.right
        if self.bottom is None:
            raise ValueError("boundary condition has no y sides")
        return self.bottom, self.top

    def is_periodic(self, axis: str = "x") -> bool:
        return isinstance(self.axis(axis)[0], Periodic)

    def dirichlet_values(self) -> list[float]:
        sides = [self.left, self.right, self.bottom, self.top]
        return [s.value for s in sides if isinstance(s, Dirichlet)]


@dataclass(frozen=True)
class Grid1D:
    x_lo: float
    x_hi: float
    n: int

    def __post_init__(self):
        if self.n < 1 or not self.x_hi > self.x_lo:
            raise ValueError(f"invalid grid [{self.x_lo}, {self.x_hi}] with n={self.n}")

    dim = 1

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / self.n

    @property
    def shape(self) -> tuple[int]:
        return (self.n,)

    @property
    def centers(self) -> np.ndarray:
        return self.x_lo + (np.arange(self.n) + 0.5) * self.dx

    @property
    def interfaces(self) -> np.ndarray:
        return self.x_lo + np.arange(self.n + 1) * self.dx

    @property
    def cell_volume(self) -> float:
        return self.dx

    @property
    def volume(self) -> float:
        return self.x_hi - self.x_lo


@dataclass(frozen=True)
class Grid2D:
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("cell counts must be positive")
        if not (self.x_hi > self.x_lo and self.y_hi > self.y_lo):
            raise ValueError("empty domain")

    dim = 2

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / self.nx

    @property
    def dy(self) -> float:
        return (self.y_hi - self.y_lo) / self.ny

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def xc(self) -> np.ndarray:
        return self.x_lo + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def yc(self) -> np.ndarray:
        return self.y_lo + (np.arange(self.ny) + 0.5) * self.dy

    @property
    def xf(self) -> np.ndarray:
        return self.x_lo + np.arange(self.nx + 1) * self.dx

    @property
    def yf(self) -> np.ndarray:
        return self.y_lo + np.arange(self.ny + 1) * self.dy

    @property
    def cell_volume(self) -> float:
        return self.dx * self.dy

    @property
    def volume(self) -> float:
        return (self.x_hi - self.x_lo) * (self.y_hi - self.y_lo)


Grid = Union[Grid1D, Grid2D]


@dataclass
class CellField:
    """Cell averages attached to a grid, plus boundary metadata."""

    grid: Grid
    values: np.ndarray
    bc: BoundaryCondition = field(default_factory=BoundaryCondition)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values have shape {self.values.shape}, grid expects {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("cell averages must be finite")

    def with_values(self, values: np.ndarray) -> "CellField":
        return CellField(self.grid, values, self.bc)

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())

    def mass(self) -> float:
        return float(self.values.sum() * self.grid.cell_volume)


def _gauss(quad_points: int):
    if quad_points < 1:
        raise ValueError("need at least one quadrature point")
    return np.polynomial.legendre.leggauss(quad_points)


def project_cell_averages(fn: Callable, grid: Grid1D, quad_points: int = 8,
                          bc: BoundaryCondition | None = None) -> CellField:
    """Gauss-Legendre cell averages of ``fn`` (vectorized over x)."""
    xi, w = _gauss(quad_points)
    x = grid.centers[:, None] + 0.5 * grid.dx * xi[None, :]
    vals = np.broadcast_to(np.asarray(fn(x), dtype=float), x.shape)
    if not np.all(np.isfinite(vals)):
        raise ValueError("function is not finite on the grid")
    return CellField(grid, 0.5 * vals @ w, bc or BoundaryCondition.periodic(1))


def project_cell_averages_2d(fn: Callable, grid: Grid2D, quad_points: int = 8,
                             bc: BoundaryCondition | None = None) -> CellField:
    """Tensor-product Gauss-Legendre cell averages of ``fn(x, y)``."""
    xi, w = _gauss(quad_points)
    x = grid.xc[:, None] + 0.5 * grid.dx * xi[None, :]  # (nx, q)
    y = grid.yc[:, None] + 0.5 * grid.dy * xi[None, :]  # (ny, q)
    X = x[None, None, :, :]
    Y = y[:, :, None, None]
    vals = np.broadcast_to(np.asarray(fn(X, Y), dtype=float),
                           (grid.ny, quad_points, grid.nx, quad_points))
    if not np.all(np.isfinite(vals)):
        raise ValueError("function is not finite on the grid")
    avg = 0.25 * np.einsum("aqbr,q,r->ab", vals, w, w)
    return CellField(grid, avg, bc or BoundaryCondition.periodic(2))


def _pad_axis(a: np.ndarray, width: int, sides: tuple[Side, Side], axis: int) -> np.ndarray:
    lo, hi = sides
    if isinstance(lo, Periodic):
        pad = [(0, 0)] * a.ndim
        pad[axis] = (width, width)
        return np.pad(a, pad, mode="wrap")
    shape_lo = list(a.shape)
    shape_lo[axis] = width
    return np.concatenate(
        [np.full(shape_lo, lo.value), a, np.full(shape_lo, hi.value)], axis=axis)


def pad(values: np.ndarray, width: int, bc: BoundaryCondition) -> np.ndarray:
    """Ghost-extend a raw 1D or 2D value array."""
    if width < 1:
        raise ValueError("ghost width must be >= 1")
    if values.ndim == 1:
        return _pad_axis(values, width, bc.axis("x"), 0)
    out = _pad_axis(values, width, bc.axis("x"), 1)
    return _pad_axis(out, width, bc.axis("y"), 0)


def extend_with_ghosts(fld: CellField, width: int) -> np.ndarray:
    """Cell values with ``width`` ghost layers on every side."""
    return pad(fld.values, width, fld.bc)
