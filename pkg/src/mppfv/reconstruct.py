"""Reconstruction of interface values and diffusion fluxes from cell averages.

Coefficients for the (2k+1)-cell linear reconstructions are generated once,
in exact rational arithmetic, from the derivative of the Lagrange interpolant
of the primitive function.  Offsets are measured in cells from the stencil
center; the center cell occupies [-1/2, 1/2].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

SUPPORTED_K = (2, 3, 4)
WENO_EPS = 1e-6

# cell averages -> cell-center values of cells j-1, j, j+1, j+2
R1 = np.array([
    [11 / 12, 5 / 24, -1 / 6, 1 / 24],
    [-1 / 24, 13 / 12, -1 / 24, 0.0],
    [0.0, -1 / 24, 13 / 12, -1 / 24],
    [1 / 24, -1 / 6, 5 / 24, 11 / 12],
])
# point values at centers j-1..j+2 -> derivative at x_{j+1/2}, times dx
R2 = np.array([1 / 24, -9 / 8, 9 / 8, -1 / 24])
# R2 @ R1 for a(u) = u
COMPACT_LINEAR = np.array([1.0, -15.0, 15.0, -1.0]) / 12.0

R1_EXACT = [
    [Fraction(11, 12), Fraction(5, 24), Fraction(-1, 6), Fraction(1, 24)],
    [Fraction(-1, 24), Fraction(13, 12), Fraction(-1, 24), Fraction(0)],
    [Fraction(0), Fraction(-1, 24), Fraction(13, 12), Fraction(-1, 24)],
    [Fraction(1, 24), Fraction(-1, 6), Fraction(5, 24), Fraction(11, 12)],
]
R2_EXACT = [Fraction(1, 24), Fraction(-9, 8), Fraction(9, 8), Fraction(-1, 24)]


@dataclass(frozen=True)
class ReconScheme:
    k: int = 2
    weight_mode: str = "linear"  # or "wenojs"

    def __post_init__(self):
        if self.k not in SUPPORTED_K:
            raise ValueError(f"unsupported k={self.k}; expected one of {SUPPORTED_K}")
        if self.weight_mode not in ("linear", "wenojs"):
            raise ValueError(f"unknown weight mode {self.weight_mode!r}")
        if self.weight_mode == "wenojs" and self.k != 2:
            raise ValueError("WENO-JS weights are only available for k = 2")

    @property
    def order(self) -> int:
        return 2 * self.k + 1

    @classmethod
    def from_order(cls, order: int, weight_mode: str = "linear") -> "ReconScheme":
        if order % 2 == 0:
            raise ValueError(f"order must be odd, got {order}")
        return cls((order - 1) // 2, weight_mode)


def _lagrange_derivative(nodes, l, xi):
    """d/dx of the l-th Lagrange basis polynomial on ``nodes`` at ``xi``."""
    xl = nodes[l]
    total = Fraction(0)
    for m, xm in enumerate(nodes):
        if m == l:
            continue
        term = Fraction(1) / (xl - xm)
        for q, xq in enumerate(nodes):
            if q != l and q != m:
                term *= (xi - xq) / (xl - xq)
        total += term
    return total


def stencil_coefficients_exact(offsets, xi) -> list[Fraction]:
    """Exact weights mapping cell averages at ``offsets`` to the point value at ``xi``.

    The offsets must be consecutive integers.  Uses P(x) = integral of u from
    the leftmost interface; u(xi) = P'(xi) and P at interface e equals the sum
    of the averages of the cells left of e.
    """
    offsets = list(offsets)
    if offsets != list(range(offsets[0], offsets[0] + len(offsets))):
        raise ValueError("offsets must be consecutive")
    xi = Fraction(xi)
    edges = [Fraction(2 * s - 1, 2) for s in offsets] + [Fraction(2 * offsets[-1] + 1, 2)]
    dL = [_lagrange_derivative(edges, e, xi) for e in range(len(edges))]
    # cell s (index c) is left of edges c+1..end
    return [sum(dL[c + 1:], Fraction(0)) for c in range(len(offsets))]


@lru_cache(maxsize=None)
def linear_coefficients(k: int) -> np.ndarray:
    """Weights c (length 2k+1) with u^-_{j+1/2} = sum_r c[r+k] * ubar_{j+r}."""
    if k not in SUPPORTED_K:
        raise ValueError(f"unsupported k={k}")
    c = stencil_coefficients_exact(range(-k, k + 1), Fraction(1, 2))
    return np.array([float(v) for v in c])


@lru_cache(maxsize=None)
def node_coefficients(k: int, nodes: tuple) -> np.ndarray:
    """Centered (2k+1)-cell weights for point values at reference positions in the cell.

    Row g gives the value at offset ``nodes[g]`` (in units of the cell width).
    Exact rational nodes are not required; the Lagrange derivative is evaluated
    in floating point here because Gauss nodes are irrational.
    """
    edges = np.arange(-k, k + 2) - 0.5
    out = np.zeros((len(nodes), 2 * k + 1))
    for g, xi in enumerate(nodes):
        dL = np.zeros(len(edges))
        for l, xl in enumerate(edges):
            tot = 0.0
            for m, xm in enumerate(edges):
                if m == l:
                    continue
                term = 1.0 / (xl - xm)
                for q, xq in enumerate(edges):
                    if q != l and q != m:
                        term *= (xi - xq) / (xl - xq)
                tot += term
            dL[l] = tot
        out[g] = np.cumsum(dL[::-1])[::-1][1:]
    return out


def recon_left_value(stencil, k: int) -> float:
    """u^- at the right interface of the center cell of a (2k+1)-cell stencil."""
    stencil = np.asarray(stencil, dtype=float)
    if stencil.shape != (2 * k + 1,):
        raise ValueError(f"stencil must have length {2 * k + 1}")
    return float(linear_coefficients(k) @ stencil)


# sub-stencil weights for u^- at x_{j+1/2}; rows = sub-stencils r = 0, 1, 2
_W5_SUB = np.array([
    [1 / 3, -7 / 6, 11 / 6, 0, 0],
    [0, -1 / 6, 5 / 6, 1 / 3, 0],
    [0, 0, 1 / 3, 5 / 6, -1 / 6],
])
_W5_LINEAR = np.array([0.1, 0.6, 0.3])


def _weno5(v0, v1, v2, v3, v4):
    """Vectorized WENO-JS u^- from the five averages v0..v4 = ubar_{j-2..j+2}."""
    q0 = (2 * v0 - 7 * v1 + 11 * v2) / 6
    q1 = (-v1 + 5 * v2 + 2 * v3) / 6
    q2 = (2 * v2 + 5 * v3 - v4) / 6
    b0 = 13 / 12 * (v0 - 2 * v1 + v2) ** 2 + 0.25 * (v0 - 4 * v1 + 3 * v2) ** 2
    b1 = 13 / 12 * (v1 - 2 * v2 + v3) ** 2 + 0.25 * (v1 - v3) ** 2
    b2 = 13 / 12 * (v2 - 2 * v3 + v4) ** 2 + 0.25 * (3 * v2 - 4 * v3 + v4) ** 2
    a0 = 0.1 / (WENO_EPS + b0) ** 2
    a1 = 0.6 / (WENO_EPS + b1) ** 2
    a2 = 0.3 / (WENO_EPS + b2) ** 2
    return (a0 * q0 + a1 * q1 + a2 * q2) / (a0 + a1 + a2)


def recon_weno5_left_value(stencil) -> float:
    stencil = np.asarray(stencil, dtype=float)
    if stencil.shape != (5,):
        raise ValueError("WENO5 stencil must have length 5")
    return float(_weno5(*stencil))


def weno5_substencil_values(stencil) -> np.ndarray:
    return _W5_SUB @ np.asarray(stencil, dtype=float)


def interface_values(ue: np.ndarray, width: int, n: int, scheme: ReconScheme):
    """u^- and u^+ at the n+1 interfaces along the last axis of a ghost-extended array.

    Interface i is the left edge of cell i (i = 0..n).  ``ue`` holds
    ``n + 2*width`` entries along the last axis with ``width >= k + 1``.
    """
    k = scheme.k
    if width < k + 1:
        raise ValueError("ghost width too small for the stencil")
    base = width - 1  # ue index of cell -1, the left neighbour of interface 0
    m = n + 1
    if scheme.weight_mode == "wenojs":
        left = [ue[..., base + r: base + r + m] for r in range(-2, 3)]
        right = [ue[..., base + 1 - r: base + 1 - r + m] for r in range(-2, 3)]
        return _weno5(*left), _weno5(*right)
    c = linear_coefficients(k)
    um = np.zeros(ue.shape[:-1] + (m,))
    up = np.zeros_like(um)
    for r in range(-k, k + 1):
        w = c[r + k]
        um += w * ue[..., base + r: base + r + m]
        up += w * ue[..., base + 1 - r: base + 1 - r + m]
    return um, up


def _r1_rows(s0, s1, s2, s3):
    # R1 regrouped as value + weighted differences so constant data is reproduced exactly
    d1, d2, d3 = s1 - s0, s2 - s1, s3 - s2
    return (s0 + d1 / 12 - d2 / 8 + d3 / 24,
            s1 - (d2 - d1) / 24,
            s2 - (d3 - d2) / 24,
            s3 - d3 / 12 + d2 / 8 - d1 / 24)


def _r2_sum(a0, a1, a2, a3):
    return 9 / 8 * (a2 - a1) - (a3 - a0) / 24


def r1_point_values(ubar) -> np.ndarray:
    """Point values at the centers of cells j-1..j+2 (last axis of length 4)."""
    ubar = np.asarray(ubar, dtype=float)
    return np.stack(_r1_rows(*np.moveaxis(ubar, -1, 0)), axis=-1)


def r2_diffusion_flux(a_vals, dx: float):
    """d/dx of the cubic through a at centers j-1..j+2, evaluated at x_{j+1/2}."""
    if not dx > 0:
        raise ValueError("dx must be positive")
    a_vals = np.asarray(a_vals, dtype=float)
    return _r2_sum(*np.moveaxis(a_vals, -1, 0)) / dx


def compact_diffusion_flux(ubar_window, a, dx: float):
    return r2_diffusion_flux(a(r1_point_values(ubar_window)), dx)


def compact_diffusion_fluxes(ue: np.ndarray, width: int, n: int, a, dx: float) -> np.ndarray:
    """Vectorized compact diffusion flux a(u)_x at all n+1 interfaces (last axis)."""
    if width < 2:
        raise ValueError("compact diffusion needs two ghost cells")
    m = n + 1
    s = [ue[..., width - 2 + q: width - 2 + q + m] for q in range(4)]
    return _r2_sum(*(a(pv) for pv in _r1_rows(*s))) / dx


def gauss_nodes(k: int):
    """Gauss-Legendre nodes (offsets in [-1/2, 1/2]) and weights summing to 2."""
    xi, w = np.polynomial.legendre.leggauss(k + 1)
    return 0.5 * xi, w


def recon_line_averages_y(ue_cols: np.ndarray, width: int, ny: int, k: int) -> np.ndarray:
    """x-line averages at the Gauss nodes of every y-cell.

    ``ue_cols`` is ghost-extended along axis 0 (y).  Returns an array of shape
    ``(k+1, ny) + ue_cols.shape[1:]``.
    """
    nodes, _ = gauss_nodes(k)
    C = node_coefficients(k, tuple(nodes))
    out = np.zeros((len(nodes), ny) + ue_cols.shape[1:])
    for r in range(-k, k + 1):
        sl = ue_cols[width + r: width + r + ny]
        for g in range(len(nodes)):
            out[g] += C[g, r + k] * sl
    return out


def recon_gauss_interface_values_x(line_ext: np.ndarray, width: int, nx: int, scheme: ReconScheme):
    """u^-, u^+ at (x_{i+1/2}, y_g) from ghost-extended line averages (last axis = x)."""
    return interface_values(line_ext, width, nx, scheme)
