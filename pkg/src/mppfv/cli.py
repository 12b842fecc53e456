"""Command-line front end: ``run``, ``convergence`` and ``table``.

Exit status 0 on success, 1 when a run fails, 2 on invalid input.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from .config import ConfigError, RunConfig
from .harness import (TABLES, TableResult, TableSpec, make_grid, project, run_sweep,
                      run_table, write_csv_atomic)
from .integrator import StepConfig, integrate
from .reconstruct import ReconScheme

log = logging.getLogger("mppfv")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", metavar="DIR", help="output directory")
    common.add_argument("--threads", type=int, default=1, metavar="N",
                        help="worker threads (runs are serial; kept for interface stability)")
    common.add_argument("--quiet", action="store_true", help="suppress progress output")

    p = _Parser(prog="mppfv", description="MPP finite-volume WENO/RK3 solver")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    r = sub.add_parser("run", parents=[common], help="single simulation from a config file")
    r.add_argument("--config", required=True, metavar="PATH")
    c = sub.add_parser("convergence", parents=[common], help="mesh sweep with and without limiter")
    c.add_argument("--config", required=True, metavar="PATH")
    c.add_argument("--meshes", help="comma separated mesh list (overrides the config)")
    t = sub.add_parser("table", parents=[common], help="reproduce a published table")
    t.add_argument("table_id", help=f"one of {', '.join(TABLES)}")
    t.add_argument("--config", metavar="PATH", help="optional overrides (cflc, order, ...)")
    t.add_argument("--meshes", help="comma separated mesh list")
    return p


def _mesh_arg(text):
    try:
        meshes = tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise ConfigError(f"bad mesh list {text!r}") from None
    if not meshes or min(meshes) < 1:
        raise ConfigError("mesh list must be non-empty and positive")
    return meshes


def _outdir(args, cfg: RunConfig | None):
    d = args.output or (cfg.output_dir if cfg else None) or "."
    os.makedirs(d, exist_ok=True)
    return d


def cmd_run(args) -> int:
    cfg = RunConfig.load(args.config).validate()
    problem = cfg.make_problem()
    step = cfg.step_config(problem)
    grid = make_grid(problem, cfg.mesh(problem))
    u0 = project(problem, problem.ic, grid)
    diags = []
    u, rep = integrate(u0, problem, step, cfg.scheme(), observers=[diags.append],
                       low_kind=cfg.low_kind())
    out = _outdir(args, cfg)
    if problem.dim == 1:
        header = ["x", "u"]
        rows = zip(grid.centers, u.values)
    else:
        X, Y = np.meshgrid(grid.xc, grid.yc)
        header = ["x", "y", "u"]
        rows = zip(X.ravel(), Y.ravel(), u.values.ravel())
    sol = os.path.join(out, "solution.csv")
    dia = os.path.join(out, "diagnostics.csv")
    write_csv_atomic(sol, header, rows)
    write_csv_atomic(dia, ["t", "dt", "min", "max", "min_theta", "mass"],
                     [[d.t, d.dt_used, d.global_min, d.global_max, d.min_theta, d.mass]
                      for d in diags])
    log.info("%s: %d steps to t=%.6g, min %.12f max %.12f, %d retries",
             problem.name, rep.steps, rep.t, u.min(), u.max(), rep.retries)
    log.info("wrote %s and %s", sol, dia)
    return 0


def _emit(result: TableResult, out: str, name: str):
    path = os.path.join(out, f"{name}.csv")
    result.write_csv(path)
    sys.stdout.write(result.to_text())
    log.info("wrote %s", path)


def _progress(row):
    tag = "MPP" if row.limiter else "NonMPP"
    log.info("  %s %s mesh %d done in %.1fs", row.group, tag, row.mesh, row.seconds)


def cmd_convergence(args) -> int:
    cfg = RunConfig.load(args.config).validate()
    meshes = _mesh_arg(args.meshes) if args.meshes is not None else cfg.meshes
    if not meshes:
        raise ConfigError("convergence needs a mesh list (config 'meshes' or --meshes)")
    problem = cfg.make_problem()
    kw = cfg.step_kwargs(problem)
    kw.pop("limiter_on", None)
    limiters = (cfg.limiter,) if cfg.limiter is not None else (False, True)
    rows = run_sweep(problem, meshes, kw, cfg.scheme(), limiters, "",
                     progress=_progress)
    spec = TableSpec("convergence", problem.name, problem.name, [], problem.exact is not None)
    _emit(TableResult(spec, rows), _outdir(args, cfg), "convergence")
    return 0


def cmd_table(args) -> int:
    if args.table_id not in TABLES:
        raise ConfigError(f"unknown table {args.table_id!r}; known: {', '.join(TABLES)}")
    overrides = {}
    cfg = None
    if args.config:
        cfg = RunConfig.load(args.config)
        for key, target in (("cflc", "cflc"), ("cfld", "cfld"), ("t_end", "t_end"),
                            ("dt_exponent", "dt_exponent"), ("dt_rule", "dt_rule"),
                            ("limit_stages", "limit_stages"), ("order", "order"),
                            ("weight_mode", "weight_mode")):
            v = getattr(cfg, key)
            if v is not None:
                overrides[target] = v
    meshes = _mesh_arg(args.meshes) if args.meshes is not None else (cfg.meshes if cfg else None)
    try:
        StepConfig(**{k: v for k, v in overrides.items() if k not in ("order", "weight_mode")})
        ReconScheme.from_order(overrides.get("order", 5), overrides.get("weight_mode", "linear"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    result = run_table(args.table_id, overrides, meshes=meshes, progress=_progress)
    _emit(result, _outdir(args, cfg), args.table_id)
    return 0


COMMANDS = {"run": cmd_run, "convergence": cmd_convergence, "table": cmd_table}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
    except ConfigError as exc:
        print(f"mppfv: error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr, force=True)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"mppfv: invalid input: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # integration or I/O failure
        print(f"mppfv: run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
