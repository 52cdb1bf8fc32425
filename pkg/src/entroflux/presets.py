"""Run configurations, shock-tube presets, and the flat config-file format."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ConfigError, UnknownPreset
from .moment13 import ModelParams, PhysicalState
from .scheme import GridConfig

__all__ = [
    "RiemannIC",
    "RunConfig",
    "preset",
    "PRESET_NAMES",
    "dump_config",
    "parse_config",
    "with_closure",
]

MODEL_NAMES = ("moment13", "euler")
CLOSURE_NAMES = ("none", "naive", "entropic-full", "entropic-scalar")
PRESET_NAMES = ("paper-case-1", "paper-case-2", "sod-euler")


@dataclass(frozen=True)
class RiemannIC:
    """Left/right equilibrium states separated by a membrane at x_m."""

    left: PhysicalState
    right: PhysicalState
    x_m: float = 0.5


@dataclass(frozen=True)
class RunConfig:
    model: str
    closure: str            # 'none' for the homogeneous Euler runs
    grid: GridConfig
    params: ModelParams
    ic: RiemannIC
    out_dir: str = "out"
    snapshots: int = 4
    formats: tuple[str, ...] = ("csv", "gnuplot")
    projection: str = "limited"

    def validate(self) -> "RunConfig":
        if self.model not in MODEL_NAMES:
            raise ConfigError(f"unknown model '{self.model}'")
        if self.closure not in CLOSURE_NAMES:
            raise ConfigError(f"unknown closure '{self.closure}'")
        if self.model == "euler" and self.closure != "none":
            raise ConfigError("the euler model admits only the trivial closure 'none'")
        if self.model == "moment13" and self.closure == "none":
            raise ConfigError("the moment13 model needs a remainder closure")
        if self.model == "euler" and (self.ic.left.q1 != 0.0 or self.ic.right.q1 != 0.0):
            raise ConfigError("euler initial data must have q1 = 0")
        if self.projection not in ("limited", "plain"):
            raise ConfigError(f"unknown projection '{self.projection}'")
        if self.snapshots < 0:
            raise ConfigError("snapshots must be >= 0")
        for f in self.formats:
            if f not in ("csv", "gnuplot"):
                raise ConfigError(f"unknown output format '{f}'")
        return self


def _equilibrium(rho: float, pi: float) -> PhysicalState:
    return PhysicalState(rho=rho, M1=0.0, pi11=pi, pi22=pi, q1=0.0)


def preset(name: str) -> RunConfig:
    """Named run configurations for the two shock-tube regimes.

    paper-case-1: strongly relaxing regime (epsilon = 1e-4), moderate jump.
    paper-case-2: rarefied regime (epsilon = 1), large pressure ratio; the
        regime where the naive remainder treatment develops oscillations.
    sod-euler: case-1 data mapped onto the homogeneous Euler system
        (p = rho * tr(pi) / 3), used for quantitative validation against the
        exact Riemann solution.
    """
    if name == "paper-case-1":
        return RunConfig(
            model="moment13",
            closure="entropic-scalar",
            grid=GridConfig(n=800, lam=1.0 / 9.0, t_end=0.07),
            params=ModelParams(F=5.0 / 3.0, b=0.05, dbar=4.0 / 3.0, epsilon=1e-4),
            ic=RiemannIC(_equilibrium(1.0, 5.0 / 3.0), _equilibrium(0.125, 4.0 / 3.0)),
            out_dir="out-case1",
        )
    if name == "paper-case-2":
        return RunConfig(
            model="moment13",
            closure="entropic-scalar",
            grid=GridConfig(n=600, lam=0.025, t_end=0.02),
            params=ModelParams(F=5.0 / 3.0, b=0.05, dbar=4.0 / 3.0, epsilon=1.0),
            ic=RiemannIC(_equilibrium(1.0, 30.0), _equilibrium(0.025, 8.0 / 3.0)),
            out_dir="out-case2",
        )
    if name == "sod-euler":
        return RunConfig(
            model="euler",
            closure="none",
            grid=GridConfig(n=800, lam=1.0 / 9.0, t_end=0.07),
            params=ModelParams(F=5.0 / 3.0, b=0.05, dbar=4.0 / 3.0, epsilon=1e-4),
            ic=RiemannIC(_equilibrium(1.0, 5.0 / 3.0), _equilibrium(0.125, 4.0 / 3.0)),
            out_dir="out-sod",
        )
    raise UnknownPreset(f"unknown preset '{name}' (choose from {', '.join(PRESET_NAMES)})")


# ---------------------------------------------------------------------------
# flat key = value configuration files
# ---------------------------------------------------------------------------

_STATE_KEYS = ("rho", "m1", "pi11", "pi22", "q1")


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dump_config(cfg: RunConfig) -> str:
    """Serialize a configuration to the flat text format (round-trip exact)."""
    lines = ["# entroflux run configuration"]
    lines.append(f"model = {cfg.model}")
    lines.append(f"closure = {cfg.closure}")
    g = cfg.grid
    lines += [
        f"n = {g.n}",
        f"lambda = {_fmt(g.lam)}",
        f"t_end = {_fmt(g.t_end)}",
        f"x_lo = {_fmt(g.x_lo)}",
        f"x_hi = {_fmt(g.x_hi)}",
    ]
    p = cfg.params
    lines += [
        f"F = {_fmt(p.F)}",
        f"b = {_fmt(p.b)}",
        f"dbar = {_fmt(p.dbar)}",
        f"epsilon = {_fmt(p.epsilon)}",
        f"entropy_log_norm = {_fmt(p.entropy_log_norm)}",
    ]
    for side, st in (("left", cfg.ic.left), ("right", cfg.ic.right)):
        vals = (st.rho, st.M1, st.pi11, st.pi22, st.q1)
        lines += [f"{k}_{side} = {_fmt(v)}" for k, v in zip(_STATE_KEYS, vals)]
    lines += [
        f"x_m = {_fmt(cfg.ic.x_m)}",
        f"out_dir = {cfg.out_dir}",
        f"snapshots = {cfg.snapshots}",
        f"formats = {','.join(cfg.formats)}",
        f"projection = {cfg.projection}",
    ]
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> RunConfig:
    """Parse the flat `key = value` format ('#' starts a comment)."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got '{raw.strip()}'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        entries[key] = value

    def need(key: str) -> str:
        if key not in entries:
            raise ConfigError(f"missing config key '{key}'")
        return entries.pop(key)

    def fnum(key: str) -> float:
        raw = need(key)
        try:
            v = float(raw)
        except ValueError:
            raise ConfigError(f"config key '{key}': not a number: '{raw}'")
        if not math.isfinite(v):
            raise ConfigError(f"config key '{key}': must be finite")
        return v

    model = need("model")
    closure = need("closure")
    try:
        grid = GridConfig(
            n=int(need("n")), lam=fnum("lambda"), t_end=fnum("t_end"),
            x_lo=fnum("x_lo"), x_hi=fnum("x_hi"),
        )
        params = ModelParams(
            F=fnum("F"), b=fnum("b"), dbar=fnum("dbar"), epsilon=fnum("epsilon"),
            entropy_log_norm=fnum("entropy_log_norm"),
        )
    except ValueError as err:
        raise ConfigError(str(err))
    states = {}
    for side in ("left", "right"):
        vals = [fnum(f"{k}_{side}") for k in _STATE_KEYS]
        states[side] = PhysicalState(rho=vals[0], M1=vals[1], pi11=vals[2],
                                     pi22=vals[3], q1=vals[4])
    ic = RiemannIC(left=states["left"], right=states["right"], x_m=fnum("x_m"))
    cfg = RunConfig(
        model=model, closure=closure, grid=grid, params=params, ic=ic,
        out_dir=need("out_dir"), snapshots=int(need("snapshots")),
        formats=tuple(need("formats").split(",")), projection=need("projection"),
    )
    if entries:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(entries))}")
    return cfg.validate()


def with_closure(cfg: RunConfig, closure: str) -> RunConfig:
    return replace(cfg, closure=closure).validate()
