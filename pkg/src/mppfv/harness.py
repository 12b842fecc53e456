"""Error norms, convergence orders, the coefficient oracle and table runs."""

from __future__ import annotations

import csv
import math
import os
import tempfile
import time
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .grid import CellField, Grid1D, Grid2D, project_cell_averages, project_cell_averages_2d
from .integrator import StepConfig, integrate
from .problems import make_problem
from .reconstruct import ReconScheme

QUAD_POINTS = 8


# norms and orders ------------------------------------------------------------

def error_norms(numeric: CellField, exact_averages: CellField, normalize: bool = True):
    """(L1, Linf) of the cell-average difference.

    L1 is sum |d_j| * cell volume, divided by the domain volume when
    ``normalize`` is set (the default, which is what the published tables use).
    """
    if numeric.grid != exact_averages.grid:
        raise ValueError("error_norms needs fields on the same grid")
    d = np.abs(np.asarray(numeric.values) - np.asarray(exact_averages.values))
    l1 = float(d.sum() * numeric.grid.cell_volume)
    if normalize:
        l1 /= numeric.grid.volume
    return l1, float(d.max())


def convergence_orders(errors) -> list[float]:
    """log2(e_coarse / e_fine) per mesh doubling; NaN where a ratio is undefined."""
    out = []
    for ec, ef in zip(errors[:-1], errors[1:]):
        if ec > 0 and ef > 0 and math.isfinite(ec) and math.isfinite(ef):
            out.append(math.log2(ec / ef))
        else:
            out.append(float("nan"))
    return out


# coefficient oracle -------------------------------------------------------------

@dataclass(frozen=True)
class PointValue:
    xi: float  # position in cell widths relative to the center of cell 0


@dataclass(frozen=True)
class DerivativeAtInterface:
    xi: float = 0.5


def coefficient_oracle(stencil_offsets, target, data: str = "averages") -> np.ndarray:
    """Weights c with sum_j c_j q_j = target(p) for every polynomial p of degree < len(offsets).

    ``q_j`` are cell averages over [j - 1/2, j + 1/2] (``data='averages'``) or
    point values at the centers (``data='points'``).  Unit spacing; a
    derivative target is scaled by 1/dx by the caller.  Dense LU solve with
    partial pivoting on a monomial basis centered at the target point.
    """
    offs = np.asarray(stencil_offsets, dtype=float)
    if offs.ndim != 1 or offs.size == 0:
        raise ValueError("need a non-empty 1D stencil")
    if np.unique(offs).size != offs.size:
        raise ValueError("stencil offsets must be distinct")
    m = offs.size
    xi = float(target.xi)
    p = np.arange(m)
    if data == "averages":
        hi = (offs[None, :] + 0.5 - xi) ** (p[:, None] + 1)
        lo = (offs[None, :] - 0.5 - xi) ** (p[:, None] + 1)
        A = (hi - lo) / (p[:, None] + 1)
    elif data == "points":
        A = (offs[None, :] - xi) ** p[:, None]
    else:
        raise ValueError(f"unknown data kind {data!r}")
    b = np.zeros(m)
    if isinstance(target, PointValue):
        b[0] = 1.0
    elif isinstance(target, DerivativeAtInterface):
        if m < 2:
            raise ValueError("a derivative needs at least two cells")
        b[1] = 1.0
    else:
        raise TypeError(f"unsupported target {target!r}")
    try:
        c = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise ValueError("singular oracle system") from exc
    if np.abs(A @ c - b).max() > 1e-12 * max(1.0, np.abs(A).max()):
        raise ValueError("oracle residual too large")
    return c


# single runs ------------------------------------------------------------------

def make_grid(problem, n: int):
    d = problem.domain
    if problem.dim == 1:
        return Grid1D(d[0], d[1], n)
    return Grid2D(d[0], d[1], d[2], d[3], n, n)


def project(problem, fn, grid):
    if problem.dim == 1:
        return project_cell_averages(fn, grid, QUAD_POINTS, bc=problem.bc)
    return project_cell_averages_2d(fn, grid, QUAD_POINTS, bc=problem.bc)


def exact_averages(problem, grid, t: float):
    if problem.exact is None:
        return None
    if problem.dim == 1:
        return project(problem, lambda x: problem.exact(x, t), grid)
    return project(problem, lambda x, y: problem.exact(x, y, t), grid)


@dataclass
class RunResult:
    field: CellField
    report: object
    exact: CellField | None
    seconds: float

    @property
    def norms(self):
        if self.exact is None:
            return float("nan"), float("nan")
        return error_norms(self.field, self.exact)


def run_case(problem, n: int, config: StepConfig, scheme: ReconScheme | None = None,
             low_kind=None, observers=()) -> RunResult:
    grid = make_grid(problem, n)
    u0 = project(problem, problem.ic, grid)
    t0 = time.perf_counter()
    u, rep = integrate(u0, problem, config, scheme, observers=observers, low_kind=low_kind)
    secs = time.perf_counter() - t0
    return RunResult(u, rep, exact_averages(problem, grid, config.t_end), secs)


# tables -------------------------------------------------------------------------

@dataclass
class ConvergenceRow:
    mesh: int
    l1_error: float = float("nan")
    l1_order: float = float("nan")
    linf_error: float = float("nan")
    linf_order: float = float("nan")
    umin: float = float("nan")
    umax: float = float("nan")
    group: str = ""
    limiter: bool = True
    seconds: float = 0.0


@dataclass
class Variant:
    label: str
    params: dict = field(default_factory=dict)  # problem constructor arguments
    config: dict = field(default_factory=dict)  # StepConfig overrides
    order: int = 5
    meshes: tuple | None = None


@dataclass
class TableSpec:
    table_id: str
    title: str
    problem: str
    variants: list
    accuracy: bool
    meshes: tuple = ()


def _advection_variants(order, meshes):
    k = (order - 1) // 2
    out = []
    for cfl in (0.9, 0.7):
        out.append(Variant(f"order={order} CFL={cfl}", config={
            "cflc": cfl, "dt_rule": "alpha", "dt_exponent": (2 * k + 1) / 3},
            order=order, meshes=meshes))
    return out


TABLES = {
    "t1": TableSpec("t1", "u_t + u_x = 0, sin^4 ic, over-diffusive LF alpha=1.2, order 5",
                    "advection_study_1d",
                    _advection_variants(5, (20, 40, 80, 160, 320, 640, 1280)), True),
    "t2": TableSpec("t2", "u_t + u_x = 0, sin^4 ic, over-diffusive LF alpha=1.2, order 7",
                    "advection_study_1d",
                    _advection_variants(7, (20, 40, 80, 160, 320, 640)), True),
    "t3": TableSpec("t3", "u_t + u_x = 0, sin^4 ic, over-diffusive LF alpha=1.2, order 9",
                    "advection_study_1d",
                    _advection_variants(9, (20, 40, 80, 160, 320)), True),
    "t4": TableSpec("t4", "1D linear convection-diffusion, sin^4 ic, T=1", "linear_1d",
                    [Variant("")], True),
    "t5": TableSpec("t5", "1D linear convection-diffusion, composite ic, T=1",
                    "composite_1d", [Variant("")], False),
    "t6": TableSpec("t6", "2D linear convection-diffusion, sin^4(x+y) ic, T=1", "linear_2d",
                    [Variant("")], True),
    "t7": TableSpec("t7", "1D viscous Burgers, T=0.05", "burgers_1d", [Variant("")], False),
    "t8": TableSpec("t8", "1D Buckley-Leverett, T=0.2", "buckley_1d", [Variant("")], False),
    "t9": TableSpec("t9", "2D Buckley-Leverett, T=0.5", "buckley_2d", [Variant("")], False),
    "t10": TableSpec("t10", "1D porous medium, N=100, T=2", "porous_1d",
                     [Variant(f"m={m}", params={"m": m}, meshes=(100,)) for m in (2, 3, 5, 8)],
                     False),
    "t11": TableSpec("t11", "rotation with viscosity, T=0.1", "rotation_2d",
                     [Variant(f"Re={re}", params={"re": float(re)}) for re in (100, 10000)],
                     False),
    "t12": TableSpec("t12", "swirling deformation with viscosity, T=0.1", "swirling_2d",
                     [Variant(f"Re={re}", params={"re": float(re)}) for re in (100, 10000)],
                     False),
    "t13": TableSpec("t13", "vortex patch, T=0.1", "vortex_patch_2d",
                     [Variant(f"Re={re}", params={"re": float(re)}) for re in (100, 10000)],
                     False),
    "linear_2d_square": TableSpec("linear_2d_square", "2D linear, square ic, T=0.1",
                                  "linear_2d", [Variant("", params={"ic": "square"})], False),
    "porous_2d": TableSpec("porous_2d", "2D porous medium, m=2, T=0.005", "porous_2d",
                           [Variant("")], False),
}

_CONFIG_KEYS = {f.name for f in fields(StepConfig)}


@dataclass
class TableResult:
    spec: TableSpec
    rows: list

    def columns(self):
        if self.spec.accuracy:
            return ["group", "limiter", "mesh", "l1_error", "l1_order", "linf_error",
                    "linf_order", "umax", "umin"]
        return ["group", "limiter", "mesh", "umax", "umin"]

    def records(self):
        out = []
        for r in self.rows:
            rec = {"group": r.group, "limiter": "MPP" if r.limiter else "NonMPP", "mesh": r.mesh}
            for c in self.columns()[3:]:
                rec[c] = getattr(r, c)
            out.append(rec)
        return out

    def to_text(self) -> str:
        cols = self.columns()
        lines = [f"# {self.spec.table_id}: {self.spec.title}", "  ".join(f"{c:>14s}" for c in cols)]
        for rec in self.records():
            cells = []
            for c in cols:
                v = rec[c]
                if isinstance(v, float):
                    if c.endswith("order"):
                        cells.append(f"{'--':>14s}" if math.isnan(v) else f"{v:14.2f}")
                    elif c.endswith("error"):
                        cells.append(f"{v:14.2E}")
                    else:
                        cells.append(f"{v:14.12f}")
                else:
                    cells.append(f"{str(v):>14s}")
            lines.append("  ".join(cells))
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        write_csv_atomic(path, self.columns(), [[rec[c] for c in self.columns()]
                                                for rec in self.records()])


def fmt_csv_value(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v)) if not math.isfinite(v) else f"{float(v):.17g}"
    return str(v)


def write_csv_atomic(path, header, rows):
    """Header plus rows at 17 significant digits; temp file then rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt_csv_value(v) for v in row])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_sweep(problem, meshes, config_kw: dict, scheme: ReconScheme, limiters=(False, True),
              label: str = "", accuracy: bool | None = None, progress=None) -> list:
    """Rows for one problem over a mesh list, once per limiter setting."""
    if not meshes:
        raise ValueError("empty mesh list")
    if accuracy is None:
        accuracy = problem.exact is not None
    rows = []
    for lim in limiters:
        cfg = StepConfig(**{**config_kw, "limiter_on": lim})
        group_rows = []
        for n in meshes:
            res = run_case(problem, n, cfg, scheme)
            l1, linf = res.norms
            row = ConvergenceRow(n, l1, float("nan"), linf, float("nan"),
                                 res.field.min(), res.field.max(), label, lim, res.seconds)
            group_rows.append(row)
            if progress is not None:
                progress(row)
        if accuracy:
            o1 = convergence_orders([r.l1_error for r in group_rows])
            oi = convergence_orders([r.linf_error for r in group_rows])
            for r, a, b in zip(group_rows[1:], o1, oi):
                r.l1_order, r.linf_order = a, b
        rows.extend(group_rows)
    return rows


def run_table(table_id: str, overrides: dict | None = None, meshes=None,
              limiters=(False, True), variants=None, progress=None) -> TableResult:
    """Run one of the published tables with its captioned defaults.

    ``overrides`` may hold StepConfig fields plus ``order``, ``weight_mode``
    and ``t_end``.  ``variants`` selects groups by label; ``meshes`` replaces
    the mesh list of every group.
    """
    try:
        spec = TABLES[table_id]
    except KeyError:
        raise ValueError(f"unknown table {table_id!r}; known: {sorted(TABLES)}") from None
    overrides = dict(overrides or {})
    unknown = set(overrides) - _CONFIG_KEYS - {"order", "weight_mode"}
    if unknown:
        raise ValueError(f"unknown overrides {sorted(unknown)}")
    rows = []
    for var in spec.variants:
        if variants is not None and var.label not in variants:
            continue
        problem = make_problem(spec.problem, **var.params)
        defaults = dict(problem.defaults)
        mesh_list = tuple(meshes) if meshes is not None else (var.meshes or tuple(defaults["meshes"]))
        cfg_kw = {k: v for k, v in defaults.items() if k in _CONFIG_KEYS}
        cfg_kw.update(var.config)
        cfg_kw.update({k: v for k, v in overrides.items() if k in _CONFIG_KEYS})
        order = overrides.get("order", var.order)
        scheme = ReconScheme.from_order(order, overrides.get("weight_mode", "linear"))
        rows.extend(run_sweep(problem, mesh_list, cfg_kw, scheme, limiters, var.label,
                              spec.accuracy, progress))
    return TableResult(spec, rows)


def table_config(table_id: str, variant: int = 0, **overrides) -> StepConfig:
    """The StepConfig a table uses for one of its groups (handy for single runs)."""
    spec = TABLES[table_id]
    var = spec.variants[variant]
    problem = make_problem(spec.problem, **var.params)
    kw = {k: v for k, v in problem.defaults.items() if k in _CONFIG_KEYS}
    kw.update(var.config)
    kw.update(overrides)
    return replace(StepConfig(), **kw)
