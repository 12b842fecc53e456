"""Benchmark registry: fluxes, diffusion functions, initial/boundary data and bounds."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .grid import BoundaryCondition

PI = np.pi


def _zero(u):
    return np.zeros_like(np.asarray(u, dtype=float))


def _linear(c):
    return (lambda u: c * np.asarray(u, dtype=float)), (lambda u: np.full_like(np.asarray(u, dtype=float), c))


@dataclass
class VelocityField:
    """Divergence-free velocity (u, v) = (-psi_y, psi_x).

    Analytic fields supply ``u``, ``v`` and ``psi`` as functions of (x, y, t).
    For the vortex patch ``from_vorticity`` is set instead and velocities are
    recomputed from the transported vorticity at every stage.
    """

    u: Optional[Callable] = None
    v: Optional[Callable] = None
    psi: Optional[Callable] = None
    from_vorticity: bool = False

    @property
    def analytic(self) -> bool:
        return not self.from_vorticity


@dataclass
class ProblemSpec:
    name: str
    dim: int
    domain: tuple
    f: Callable = _zero
    df: Callable = _zero
    g: Callable = _zero
    dg: Callable = _zero
    a: Callable = _zero
    da: Callable = _zero
    b: Callable = _zero
    db: Callable = _zero
    ic: Callable = None
    bc: BoundaryCondition = None
    bounds: tuple = (0.0, 1.0)
    exact: Optional[Callable] = None
    velocity: Optional[VelocityField] = None
    has_convection: bool = True
    has_diffusion: bool = True
    # LF viscosity override (otherwise sampled max |f'| over the bounds)
    lf_alpha: Optional[float] = None
    low_flux: str = "lf"  # lf | godunov | overdiffusive
    low_alpha: Optional[float] = None
    params: dict = field(default_factory=dict)
    defaults: dict = field(default_factory=dict)

    @property
    def incompressible(self) -> bool:
        return self.velocity is not None


# 1D linear and advection ---------------------------------------------------

def _sin4_exact_1d(eps):
    def exact(x, t):
        return (3 / 8 - 0.5 * np.exp(-4 * eps * t) * np.cos(2 * (x - t))
                + 0.125 * np.exp(-16 * eps * t) * np.cos(4 * (x - t)))
    return exact


def linear_1d(eps=1e-5):
    f, df = _linear(1.0)
    a, da = _linear(eps)
    return ProblemSpec(
        "linear_1d", 1, (0.0, 2 * PI), f=f, df=df, a=a, da=da,
        ic=lambda x: np.sin(x) ** 4, bc=BoundaryCondition.periodic(1),
        bounds=(0.0, 1.0), exact=_sin4_exact_1d(eps), params={"eps": eps},
        defaults={"t_end": 1.0, "meshes": [50, 100, 200, 400, 800], "dt_exponent": 5 / 3})


def composite_profile(x):
    a, z, delta, gamma = 0.5, -0.7, 0.005, 10.0
    beta = np.log(2) / (36 * delta ** 2)
    x = np.asarray(x, dtype=float)

    def G(z0):
        return np.exp(-beta * (x - z0) ** 2)

    def F(a0):
        return np.sqrt(np.maximum(1 - gamma ** 2 * (x - a0) ** 2, 0.0))

    out = np.zeros_like(x)
    m = (x >= -0.8) & (x <= -0.6)
    out = np.where(m, (G(z - delta) + G(z + delta) + 4 * G(z)) / 6, out)
    out = np.where((x >= -0.4) & (x <= -0.2), 1.0, out)
    out = np.where((x >= 0.0) & (x <= 0.2), 1 - np.abs(10 * (x - 0.1)), out)
    m = (x >= 0.4) & (x <= 0.6)
    out = np.where(m, (F(a - delta) + F(a + delta) + 4 * F(a)) / 6, out)
    return out


def composite_1d(eps=1e-5):
    f, df = _linear(1.0)
    a, da = _linear(eps)
    return ProblemSpec(
        "composite_1d", 1, (-1.0, 1.0), f=f, df=df, a=a, da=da,
        ic=composite_profile, bc=BoundaryCondition.periodic(1), bounds=(0.0, 1.0),
        params={"eps": eps},
        defaults={"t_end": 1.0, "meshes": [50, 100, 200, 400, 800]})


def advection_study_1d(alpha=1.2):
    f, df = _linear(1.0)
    return ProblemSpec(
        "advection_study_1d", 1, (0.0, 2 * PI), f=f, df=df,
        ic=lambda x: np.sin(x) ** 4, bc=BoundaryCondition.periodic(1),
        bounds=(0.0, 1.0), exact=_sin4_exact_1d(0.0), has_diffusion=False,
        lf_alpha=alpha, low_flux="overdiffusive", low_alpha=alpha,
        params={"alpha": alpha},
        defaults={"t_end": 1.0, "meshes": [20, 40, 80, 160, 320, 640, 1280],
                  "dt_rule": "alpha"})


# nonlinear 1D --------------------------------------------------------------

def burgers_1d(eps=1e-4):
    a, da = _linear(eps)
    return ProblemSpec(
        "burgers_1d", 1, (-1.0, 1.0),
        f=lambda u: 0.5 * np.asarray(u) ** 2, df=lambda u: np.asarray(u, dtype=float),
        a=a, da=da, ic=lambda x: np.where(np.abs(x) < 0.5, 2.0, 0.0),
        bc=BoundaryCondition.periodic(1), bounds=(0.0, 2.0), params={"eps": eps},
        defaults={"t_end": 0.05, "meshes": [50, 100, 200, 400, 800]})


def bl_flux(u):
    u = np.asarray(u, dtype=float)
    return u ** 2 / (u ** 2 + (1 - u) ** 2)


def bl_dflux(u):
    u = np.asarray(u, dtype=float)
    return 2 * u * (1 - u) / (u ** 2 + (1 - u) ** 2) ** 2


def buckley_1d(eps=0.01):
    def a(u):
        w = np.clip(u, 0.0, 1.0)
        return eps * (2 * w ** 2 - 4 * w ** 3 / 3)

    def da(u):
        u = np.asarray(u, dtype=float)
        return np.where((u >= 0) & (u <= 1), eps * 4 * u * (1 - u), 0.0)

    return ProblemSpec(
        "buckley_1d", 1, (0.0, 1.0), f=bl_flux, df=bl_dflux, a=a, da=da,
        ic=lambda x: np.where(x < 1 / 3, 1 - 3 * x, 0.0),
        bc=BoundaryCondition.dirichlet(1.0, 0.0), bounds=(0.0, 1.0),
        params={"eps": eps},
        defaults={"t_end": 0.2, "meshes": [50, 100, 200, 400, 800], "cfld": 0.4})


# Barenblatt / porous medium ------------------------------------------------

def barenblatt(x, t, m, exponent_mode="standard"):
    """Barenblatt profile; ``exponent_mode`` is 'standard' (1/(m-1)) or 'printed' (1/(m+1))."""
    if np.any(np.asarray(t) <= 0):
        raise ValueError("Barenblatt solution needs t > 0")
    if exponent_mode == "standard":
        power = 1.0 / (m - 1)
    elif exponent_mode == "printed":
        power = 1.0 / (m + 1)
    else:
        raise ValueError(f"unknown exponent mode {exponent_mode!r}")
    k = 1.0 / (m + 1)
    x = np.asarray(x, dtype=float)
    core = 1 - k * (m - 1) / (2 * m) * x ** 2 / t ** (2 * k)
    return t ** (-k) * np.maximum(core, 0.0) ** power


def barenblatt_residual(m, exponent_mode, n=400, t=1.5, half_width=None):
    """Max-norm finite-difference residual of u_t - (u^m)_xx inside the support.

    Sampled on a grid of ``n`` points over the inner 80% of the support so the
    kink at the front does not enter the stencil.
    """
    k = 1.0 / (m + 1)
    radius = np.sqrt(2 * m / (k * (m - 1))) * t ** k
    hw = 0.8 * radius if half_width is None else half_width
    x = np.linspace(-hw, hw, n)
    h = x[1] - x[0]
    ht = h
    B = lambda xx, tt: barenblatt(xx, tt, m, exponent_mode)
    ut = (B(x, t + ht) - B(x, t - ht)) / (2 * ht)
    w = B(x, t) ** m
    wp = B(x + h, t) ** m
    wm = B(x - h, t) ** m
    return float(np.max(np.abs(ut - (wp - 2 * w + wm) / h ** 2)))


def porous_1d(m=2, exponent_mode="standard", t0=1.0):
    def a(u):
        return np.maximum(np.asarray(u, dtype=float), 0.0) ** m

    def da(u):
        return m * np.maximum(np.asarray(u, dtype=float), 0.0) ** (m - 1)

    return ProblemSpec(
        "porous_1d", 1, (-2 * PI, 2 * PI), a=a, da=da,
        ic=lambda x: barenblatt(x, t0, m, exponent_mode),
        bc=BoundaryCondition.dirichlet(0.0, 0.0), bounds=(0.0, 1.0),
        exact=lambda x, t: barenblatt(x, t0 + t, m, exponent_mode),
        has_convection=False,
        params={"m": m, "exponent_mode": exponent_mode, "t0": t0},
        defaults={"t_end": 1.0, "meshes": [100], "cfld": 0.4})


# 2D ------------------------------------------------------------------------

def linear_2d(eps=1e-3, ic="sin4"):
    f, df = _linear(1.0)
    a, da = _linear(eps)

    def exact(x, y, t):
        s = x + y - 2 * t
        return (3 / 8 - 0.5 * np.exp(-8 * eps * t) * np.cos(2 * s)
                + 0.125 * np.exp(-32 * eps * t) * np.cos(4 * s))

    if ic == "sin4":
        u0 = lambda x, y: np.sin(x + y) ** 4
        ex = exact
        defaults = {"t_end": 1.0, "meshes": [16, 32, 64, 128, 256], "dt_exponent": 5 / 3}
    elif ic == "square":
        lo, hi = PI / 2, 3 * PI / 2
        u0 = lambda x, y: np.where((x >= lo) & (x <= hi) & (y >= lo) & (y <= hi), 1.0, 0.0)
        ex = None
        defaults = {"t_end": 0.1, "meshes": [16, 32, 64, 128, 256]}
    else:
        raise ValueError(f"unknown linear_2d ic {ic!r}")
    return ProblemSpec(
        "linear_2d", 2, (0.0, 2 * PI, 0.0, 2 * PI), f=f, df=df, g=f, dg=df,
        a=a, da=da, b=a, db=da, ic=u0, bc=BoundaryCondition.periodic(2),
        bounds=(0.0, 1.0), exact=ex, params={"eps": eps, "ic": ic},
        defaults=defaults)


def buckley_2d(eps=0.01):
    def g(u):
        u = np.asarray(u, dtype=float)
        return bl_flux(u) * (1 - 5 * (1 - u) ** 2)

    def dg(u):
        u = np.asarray(u, dtype=float)
        return bl_dflux(u) * (1 - 5 * (1 - u) ** 2) + bl_flux(u) * 10 * (1 - u)

    a, da = _linear(eps)
    return ProblemSpec(
        "buckley_2d", 2, (-1.5, 1.5, -1.5, 1.5), f=bl_flux, df=bl_dflux, g=g, dg=dg,
        a=a, da=da, b=a, db=da,
        ic=lambda x, y: np.where(x ** 2 + y ** 2 < 0.5, 1.0, 0.0),
        bc=BoundaryCondition.periodic(2), bounds=(0.0, 1.0), params={"eps": eps},
        defaults={"t_end": 0.5, "meshes": [16, 32, 64, 128, 256]})


def porous_2d(m=2):
    def a(u):
        return np.maximum(np.asarray(u, dtype=float), 0.0) ** m

    def da(u):
        return m * np.maximum(np.asarray(u, dtype=float), 0.0) ** (m - 1)

    return ProblemSpec(
        "porous_2d", 2, (-1.0, 1.0, -1.0, 1.0), a=a, da=da, b=a, db=da,
        ic=lambda x, y: np.where((np.abs(x) <= 0.5) & (np.abs(y) <= 0.5), 1.0, 0.0),
        bc=BoundaryCondition.periodic(2), bounds=(0.0, 1.0), has_convection=False,
        params={"m": m},
        defaults={"t_end": 0.005, "meshes": [16, 32, 64, 128, 256], "cfld": 0.4})


def cosine_bell(x, y, x0=0.0, y0=-PI / 2, r0=0.3 * PI):
    r = np.sqrt((x - x0) ** 2 + (y - y0) ** 2)
    return np.where(r < r0, 0.5 * (1 + np.cos(PI * r / r0)), 0.0)


def _incompressible(name, domain, velocity, re, ic, bounds, t_end, extra=None):
    a, da = _linear(1.0 / re)
    return ProblemSpec(
        name, 2, domain, a=a, da=da, b=a, db=da, ic=ic,
        bc=BoundaryCondition.periodic(2), bounds=bounds, velocity=velocity,
        params={"re": re, **(extra or {})},
        defaults={"t_end": t_end, "meshes": [16, 32, 64, 128, 256], "cfld": 0.4})


def rotation_2d(re=100.0):
    vel = VelocityField(
        u=lambda x, y, t: -y + 0 * x,
        v=lambda x, y, t: x + 0 * y,
        psi=lambda x, y, t: 0.5 * (x ** 2 + y ** 2))
    return _incompressible("rotation_2d", (-PI, PI, -PI, PI), vel, re, cosine_bell, (0.0, 1.0), 0.1)


def swirling_2d(re=100.0, period=0.1):
    def gt(t):
        return np.cos(PI * t / period) * PI

    vel = VelocityField(
        u=lambda x, y, t: -np.cos(x / 2) ** 2 * np.sin(y) * gt(t),
        v=lambda x, y, t: np.sin(x) * np.cos(y / 2) ** 2 * gt(t),
        psi=lambda x, y, t: -2 * gt(t) * np.cos(x / 2) ** 2 * np.cos(y / 2) ** 2)
    return _incompressible("swirling_2d", (-PI, PI, -PI, PI), vel, re, cosine_bell,
                           (0.0, 1.0), 0.1, {"period": period})


def vortex_patch_ic(x, y):
    inx = (x >= PI / 2) & (x <= 3 * PI / 2)
    lower = inx & (y >= PI / 4) & (y <= 3 * PI / 4)
    upper = inx & (y >= 5 * PI / 4) & (y <= 7 * PI / 4)
    return np.where(lower, -1.0, np.where(upper, 1.0, 0.0))


def vortex_patch_2d(re=100.0):
    return _incompressible("vortex_patch_2d", (0.0, 2 * PI, 0.0, 2 * PI),
                           VelocityField(from_vorticity=True), re, vortex_patch_ic,
                           (-1.0, 1.0), 0.1)


REGISTRY = {
    "linear_1d": linear_1d,
    "composite_1d": composite_1d,
    "burgers_1d": burgers_1d,
    "linear_2d": linear_2d,
    "buckley_1d": buckley_1d,
    "buckley_2d": buckley_2d,
    "porous_1d": porous_1d,
    "porous_2d": porous_2d,
    "rotation_2d": rotation_2d,
    "swirling_2d": swirling_2d,
    "vortex_patch_2d": vortex_patch_2d,
    "advection_study_1d": advection_study_1d,
}


def make_problem(name: str, **params) -> ProblemSpec:
    try:
        ctor = REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; known: {sorted(REGISTRY)}") from None
    return ctor(**params)
