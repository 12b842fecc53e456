"""Flat ``key = value`` run configuration: parse, validate, serialize."""

from __future__ import annotations

import inspect
from dataclasses import dataclass, field, fields

from .flux import MonotoneFluxKind
from .integrator import StepConfig
from .problems import REGISTRY, make_problem
from .reconstruct import ReconScheme


class ConfigError(ValueError):
    """Invalid configuration; the CLI maps it to exit status 2."""


_BOOL = {"on": True, "true": True, "yes": True, "1": True,
         "off": False, "false": False, "no": False, "0": False}


def _bool(v: str) -> bool:
    try:
        return _BOOL[v.strip().lower()]
    except KeyError:
        raise ConfigError(f"expected on/off, got {v!r}") from None


def _meshes(v: str) -> tuple:
    items = [s for s in v.replace(",", " ").split() if s]
    try:
        return tuple(int(s) for s in items)
    except ValueError:
        raise ConfigError(f"bad mesh list {v!r}") from None


def _fmt_bool(b):
    return "on" if b else "off"


def _fmt_float(x):
    return repr(float(x))


def _parse_scalar(v: str):
    """Problem parameters: int, then float, else the bare string."""
    for cast in (int, float):
        try:
            return cast(v)
        except ValueError:
            pass
    return v


# key -> (parser, formatter)
_FIELDS = {
    "problem": (str, str),
    "nx": (int, str),
    "ny": (int, str),
    "order": (int, str),
    "cflc": (float, _fmt_float),
    "cfld": (float, _fmt_float),
    "limiter": (_bool, _fmt_bool),
    "limit_stages": (_bool, _fmt_bool),
    "weight_mode": (str, str),
    "t_end": (float, _fmt_float),
    "dt_exponent": (float, _fmt_float),
    "dt_rule": (str, str),
    "monotone_flux": (str, str),
    "monotone_alpha": (float, _fmt_float),
    "barenblatt_mode": (str, str),
    "meshes": (_meshes, lambda t: ",".join(str(n) for n in t)),
    "debug": (_bool, _fmt_bool),
    "output_dir": (str, str),
}


@dataclass
class RunConfig:
    """Experiment settings.  ``None`` means "use the problem default"."""

    problem: str | None = None
    nx: int | None = None
    ny: int | None = None
    order: int | None = None
    cflc: float | None = None
    cfld: float | None = None
    limiter: bool | None = None
    limit_stages: bool | None = None
    weight_mode: str | None = None
    t_end: float | None = None
    dt_exponent: float | None = None
    dt_rule: str | None = None
    monotone_flux: str | None = None
    monotone_alpha: float | None = None
    barenblatt_mode: str | None = None
    meshes: tuple | None = None
    debug: bool | None = None
    output_dir: str | None = None
    params: dict = field(default_factory=dict)  # param.NAME = value

    # building blocks ---------------------------------------------------------

    def make_problem(self):
        kw = dict(self.params)
        if self.barenblatt_mode is not None:
            kw["exponent_mode"] = self.barenblatt_mode
        return make_problem(self.problem, **kw)

    def scheme(self) -> ReconScheme:
        return ReconScheme.from_order(self.order or 5, self.weight_mode or "linear")

    def low_kind(self):
        if self.monotone_flux is None:
            return None
        return MonotoneFluxKind(self.monotone_flux, self.monotone_alpha)

    def step_kwargs(self, problem) -> dict:
        names = {f.name for f in fields(StepConfig)}
        kw = {k: v for k, v in problem.defaults.items() if k in names}
        for key, target in (("cflc", "cflc"), ("cfld", "cfld"), ("t_end", "t_end"),
                            ("dt_exponent", "dt_exponent"), ("dt_rule", "dt_rule"),
                            ("limit_stages", "limit_stages"), ("debug", "debug"),
                            ("limiter", "limiter_on")):
            v = getattr(self, key)
            if v is not None:
                kw[target] = v
        return kw

    def step_config(self, problem=None) -> StepConfig:
        problem = problem or self.make_problem()
        return StepConfig(**self.step_kwargs(problem))

    def mesh(self, problem):
        n = self.nx or problem.defaults["meshes"][0]
        if problem.dim == 2 and self.ny is not None and self.ny != n:
            raise ConfigError("only square meshes (nx = ny) are supported")
        return n

    # validation ------------------------------------------------------------------

    def validate(self) -> "RunConfig":
        if self.problem is None:
            raise ConfigError("missing required key 'problem'")
        if self.problem not in REGISTRY:
            raise ConfigError(f"unknown problem {self.problem!r}; known: {sorted(REGISTRY)}")
        sig = inspect.signature(REGISTRY[self.problem])
        for k in self.params:
            if k not in sig.parameters:
                raise ConfigError(f"problem {self.problem!r} has no parameter {k!r}")
        if self.barenblatt_mode is not None:
            if "exponent_mode" not in sig.parameters:
                raise ConfigError("barenblatt_mode only applies to porous_1d")
            if self.barenblatt_mode not in ("standard", "printed"):
                raise ConfigError(f"unknown barenblatt_mode {self.barenblatt_mode!r}")
        for k in ("nx", "ny"):
            v = getattr(self, k)
            if v is not None and v < 1:
                raise ConfigError(f"{k} must be positive")
        if self.meshes is not None and (not self.meshes or min(self.meshes) < 1):
            raise ConfigError("mesh list must be non-empty and positive")
        if self.order is not None and self.order not in (5, 7, 9):
            raise ConfigError(f"order must be 5, 7 or 9, got {self.order}")
        try:
            problem = self.make_problem()
            self.scheme()
            self.low_kind()
            self.step_config(problem)
            self.mesh(problem)
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from None
        return self

    # text form ------------------------------------------------------------------

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        cfg = cls()
        seen = set()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if not key or not value:
                raise ConfigError(f"line {lineno}: empty key or value")
            if key in seen:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            seen.add(key)
            if key.startswith("param."):
                cfg.params[key[6:]] = _parse_scalar(value)
                continue
            if key not in _FIELDS:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            try:
                setattr(cfg, key, _FIELDS[key][0](value))
            except ConfigError:
                raise
            except ValueError:
                raise ConfigError(f"line {lineno}: bad value {value!r} for {key}") from None
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.parse(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None

    def serialize(self) -> str:
        lines = []
        for key, (_, fmt) in _FIELDS.items():
            v = getattr(self, key)
            if v is not None:
                lines.append(f"{key} = {fmt(v)}")
        for k in sorted(self.params):
            v = self.params[k]
            lines.append(f"param.{k} = {_fmt_float(v) if isinstance(v, float) else v}")
        return "\n".join(lines) + "\n"
