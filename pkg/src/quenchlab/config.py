"""Plain-text experiment configuration.

One ``section.key = value`` assignment per line; ``#`` starts a comment.
Lists are comma separated, booleans are ``true``/``false``, and ``none``
clears an optional value. See ``docs/config.md`` for the full schema.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .errors import InvalidParameters, ParseError, ValidationError
from .grid import Domain, Field, Grid
from .params import ModelParams, stationary_constant
from .solver import BOUNDARY_MODES, SCHEMES, SimConfig
from . import initial as init_mod

INITIAL_KINDS = ("constant", "bump", "stationary_profile", "custom_csv")


@dataclass(frozen=True)
class InitialSpec:
    kind: str = "bump"
    value: float = 1.0
    center: float = 0.5
    width: float = 0.5
    height: float = 1.0
    path: str = ""


@dataclass(frozen=True)
class OutputSpec:
    csv_dir: str = "out"
    svg: bool = True
    snapshot_times: tuple[float, ...] = ()


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelParams
    sim: SimConfig
    domain: Domain
    n_cells: int = 256
    initial: InitialSpec = field(default_factory=InitialSpec)
    outputs: OutputSpec = field(default_factory=OutputSpec)
    ladder: tuple[tuple[float, float], ...] = ()

    def grid(self) -> Grid:
        return Grid(self.domain, self.n_cells)

    def run_config(self) -> SimConfig:
        if self.outputs.snapshot_times:
            return replace(self.sim, record_times=self.outputs.snapshot_times)
        return self.sim

    def initial_field(self, grid: Grid | None = None) -> Field:
        grid = grid or self.grid()
        ini = self.initial
        if ini.kind == "constant":
            return init_mod.constant(grid, ini.value)
        if ini.kind == "bump":
            return init_mod.bump(grid, ini.center, ini.width, ini.height)
        if ini.kind == "stationary_profile":
            p = self.model
            x0 = 0.0 if grid.is_ball else grid.domain.a
            return init_mod.power_profile(
                grid, stationary_constant(p) ** (1.0 / p.m), 2.0 / (p.m + p.beta), x0
            )
        return init_mod.from_csv(grid, ini.path)

    def resolved_eta(self) -> float:
        return self.sim.resolved_eta(float(self.initial_field().values.max()))


# key -> (section attribute, field name, type tag)
_SCHEMA: dict[str, tuple[str, str, str]] = {
    "model.m": ("model", "m", "float"),
    "model.beta": ("model", "beta", "float"),
    "model.n_dim": ("model", "n_dim", "int"),
    "model.lambda": ("model", "lam", "float"),
    "sim.eps": ("sim", "eps", "float"),
    "sim.eta": ("sim", "eta", "float?"),
    "sim.boundary_mode": ("sim", "boundary_mode", "str"),
    "sim.scheme": ("sim", "scheme", "str"),
    "sim.t_end": ("sim", "t_end", "float"),
    "sim.cfl_safety": ("sim", "cfl_safety", "float"),
    "sim.quench_tol": ("sim", "quench_tol", "float"),
    "sim.max_steps": ("sim", "max_steps", "int"),
    "sim.dt": ("sim", "dt", "float?"),
    "sim.n_records": ("sim", "n_records", "int"),
    "sim.r_ladder": ("sim", "r_ladder", "floats"),
    "sim.diffusion": ("sim", "diffusion", "bool"),
    "sim.absorption": ("sim", "absorption", "bool"),
    "sim.lq_power": ("sim", "lq_power", "float"),
    "sim.support_tol": ("sim", "support_tol", "float"),
    "domain.kind": ("domain", "kind", "str"),
    "domain.a": ("domain", "a", "float"),
    "domain.b": ("domain", "b", "float"),
    "domain.radius": ("domain", "radius", "float"),
    "domain.n_cells": ("top", "n_cells", "int"),
    "initial.kind": ("initial", "kind", "str"),
    "initial.value": ("initial", "value", "float"),
    "initial.center": ("initial", "center", "float"),
    "initial.width": ("initial", "width", "float"),
    "initial.height": ("initial", "height", "float"),
    "initial.path": ("initial", "path", "str"),
    "outputs.csv_dir": ("outputs", "csv_dir", "str"),
    "outputs.svg": ("outputs", "svg", "bool"),
    "outputs.snapshot_times": ("outputs", "snapshot_times", "floats"),
    "sweep.eps": ("sweep", "eps", "floats"),
    "sweep.eta": ("sweep", "eta", "floats"),
}

REQUIRED = ("model.m", "model.beta", "model.n_dim", "sim.t_end", "domain.kind")


def _convert(key: str, tag: str, raw: str):
    try:
        if tag == "str":
            return raw
        if tag == "bool":
            low = raw.lower()
            if low not in ("true", "false"):
                raise ValueError("expected true or false")
            return low == "true"
        if tag == "int":
            f = float(raw)
            if not f.is_integer():
                raise ValueError("expected an integer")
            return int(f)
        if tag == "float?":
            return None if raw.lower() == "none" else float(raw)
        if tag == "floats":
            return tuple(float(x) for x in raw.split(",") if x.strip()) if raw.strip() else ()
        return float(raw)
    except ValueError as exc:
        raise ValidationError(key, f"cannot read {raw!r}: {exc}") from None


def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


def _check(cond: bool, key: str, reason: str) -> None:
    if not cond:
        raise ValidationError(key, reason)


def parse_config(text: str) -> ExperimentConfig:
    values: dict[str, object] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(lineno, "expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _SCHEMA:
            raise ParseError(lineno, f"unknown key {key!r}")
        if key in values:
            raise ParseError(lineno, f"duplicate key {key!r}")
        values[key] = _convert(key, _SCHEMA[key][2], raw)
    for key in REQUIRED:
        if key not in values:
            raise ValidationError(key, "required key missing")
    return _build(values)


def _build(values: dict[str, object]) -> ExperimentConfig:
    groups: dict[str, dict[str, object]] = {}
    for key, val in values.items():
        sect, name, _ = _SCHEMA[key]
        groups.setdefault(sect, {})[name] = val

    mod = groups.get("model", {})
    _check(mod.get("m", 0) >= 1, "model.m", "must be >= 1")
    _check(mod.get("beta", 0) > 0, "model.beta", "must be > 0")
    _check(mod.get("n_dim", 0) >= 1, "model.n_dim", "must be >= 1")
    _check(mod.get("lam", 1.0) > 0, "model.lambda", "must be > 0")
    model = ModelParams(**mod)

    sim_kw = groups.get("sim", {})
    _check(sim_kw.get("boundary_mode", "lifted_eta") in BOUNDARY_MODES, "sim.boundary_mode",
           f"must be one of {BOUNDARY_MODES}")
    _check(sim_kw.get("scheme", "lie_split") in SCHEMES, "sim.scheme", f"must be one of {SCHEMES}")
    _check(sim_kw["t_end"] > 0, "sim.t_end", "must be > 0")
    try:
        sim = SimConfig(**sim_kw)
    except InvalidParameters as exc:
        raise ValidationError("sim", str(exc)) from None

    dom_kw = dict(groups.get("domain", {}))
    kind = dom_kw.pop("kind")
    try:
        if kind == "interval":
            _check(model.n_dim == 1, "domain.kind", "an interval needs model.n_dim = 1")
            _check("radius" not in dom_kw, "domain.radius", "not used by an interval")
            domain = Domain.interval(dom_kw.get("a", 0.0), dom_kw.get("b", 1.0))
        elif kind == "ball":
            _check("a" not in dom_kw and "b" not in dom_kw, "domain.a", "not used by a ball")
            domain = Domain.ball(dom_kw.get("radius", 1.0), model.n_dim)
        else:
            raise ValidationError("domain.kind", "must be 'interval' or 'ball'")
    except InvalidParameters as exc:
        raise ValidationError("domain", str(exc)) from None
    n_cells = groups.get("top", {}).get("n_cells", 256)
    _check(n_cells >= 2, "domain.n_cells", "must be >= 2")

    ini = InitialSpec(**groups.get("initial", {}))
    _check(ini.kind in INITIAL_KINDS, "initial.kind", f"must be one of {INITIAL_KINDS}")
    _check(ini.width > 0, "initial.width", "must be > 0")
    _check(ini.height >= 0 and ini.value >= 0, "initial", "values must be >= 0")
    _check(ini.kind != "custom_csv" or bool(ini.path), "initial.path", "required for custom_csv")
    if ini.kind == "stationary_profile":
        try:
            stationary_constant(model)
        except Exception as exc:
            raise ValidationError("initial.kind", str(exc)) from None

    out = OutputSpec(**groups.get("outputs", {}))
    _check(all(0 <= t <= sim.t_end for t in out.snapshot_times), "outputs.snapshot_times",
           "must lie in [0, t_end]")

    sw = groups.get("sweep", {})
    eps_l, eta_l = sw.get("eps", ()), sw.get("eta", ())
    if eta_l and len(eta_l) not in (1, len(eps_l)):
        raise ValidationError("sweep.eta", "give one value or one per eps")
    if eps_l:
        etas = eta_l * len(eps_l) if len(eta_l) == 1 else (eta_l or eps_l)
        ladder = tuple(zip(eps_l, etas))
        _check(all(b < a for a, b in zip(eps_l, eps_l[1:])), "sweep.eps", "must be strictly decreasing")
        _check(all(n <= e for e, n in ladder), "sweep.eta", "each eta must be <= its eps")
    else:
        if eta_l:
            raise ValidationError("sweep.eta", "needs sweep.eps")
        ladder = ()

    return ExperimentConfig(model, sim, domain, n_cells, ini, out, ladder)


def serialize(cfg: ExperimentConfig) -> str:
    lines = []
    m = cfg.model
    lines += [f"model.m = {_fmt(float(m.m))}", f"model.beta = {_fmt(float(m.beta))}",
              f"model.n_dim = {m.n_dim}", f"model.lambda = {_fmt(float(m.lam))}"]
    for key, (sect, name, _) in _SCHEMA.items():
        if sect == "sim":
            val = getattr(cfg.sim, name)
            if isinstance(val, (int, float)) and not isinstance(val, bool) and _SCHEMA[key][2].startswith("float"):
                val = float(val)
            lines.append(f"{key} = {_fmt(val)}")
    d = cfg.domain
    lines.append(f"domain.kind = {d.kind}")
    if d.kind == "interval":
        lines += [f"domain.a = {_fmt(float(d.a))}", f"domain.b = {_fmt(float(d.b))}"]
    else:
        lines.append(f"domain.radius = {_fmt(float(d.radius))}")
    lines.append(f"domain.n_cells = {cfg.n_cells}")
    for f in fields(InitialSpec):
        val = getattr(cfg.initial, f.name)
        lines.append(f"initial.{f.name} = {_fmt(float(val) if f.type == 'float' else val)}")
    for f in fields(OutputSpec):
        lines.append(f"outputs.{f.name} = {_fmt(getattr(cfg.outputs, f.name))}")
    if cfg.ladder:
        lines.append(f"sweep.eps = {_fmt(tuple(e for e, _ in cfg.ladder))}")
        lines.append(f"sweep.eta = {_fmt(tuple(n for _, n in cfg.ladder))}")
    return "\n".join(lines) + "\n"


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))
