"""Flat key=value run configuration and the one-line function-spec grammar.

Config files are UTF-8 text, one `key = value` per line, `#` starts a
comment, unknown keys are rejected. Function-valued keys (k, w, F, y, v0)
use a one-line preset grammar:

    zero
    const value=<r>
    sine m=<int> amp=<r>                 amp*sin(m*pi*x/L), space only
    sine_xt m=<int> amp=<r> omega=<r>    amp*sin(m*pi*x/L)*sin(omega*t), space-time only
    poly c0=<r> c1=<r> c2=<r>            c0 + c1*x + c2*x^2, space only
    file path=<p>                        CSV in the field schema

Required keys: L, T, Nx, Nt, alpha, v_c, k, w, F, y. Everything else is
optional with the defaults below.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field

import numpy as np

from .control import OptimizerConfig
from .dynamics import BeamProblem
from .errors import ConfigError, InvalidStiffnessError
from .grid import Grid, SpaceField, SpaceTimeField

REQUIRED_KEYS = ("L", "T", "Nx", "Nt", "alpha", "v_c", "k", "w", "F", "y")
FUNCTION_KEYS = ("k", "w", "F", "y", "v0")
SPACETIME_KEYS = ("F", "y")
OPTIMIZER_KEYS = ("step_mode", "step_size", "eps", "max_iters", "power_iters",
                  "power_tol", "shrink", "seed")
PATH_KEYS = ("out", "vout", "report")
KNOWN_KEYS = set(REQUIRED_KEYS) | set(FUNCTION_KEYS) | set(OPTIMIZER_KEYS) | set(PATH_KEYS)

# preset name -> (parameter name -> converter)
PRESETS = {
    "zero": {},
    "const": {"value": float},
    "sine": {"m": int, "amp": float},
    "sine_xt": {"m": int, "amp": float, "omega": float},
    "poly": {"c0": float, "c1": float, "c2": float},
    "file": {"path": str},
}
SPACE_ONLY = ("sine", "poly")
SPACETIME_ONLY = ("sine_xt",)


@dataclass(frozen=True)
class FunctionSpec:
    kind: str
    params: dict = dc_field(default_factory=dict)
    line: int = 0


@dataclass(frozen=True, eq=False)
class RunConfig:
    length: float
    horizon: float
    nx: int
    nt: int
    alpha: float
    control_radius: float
    stiffness_spec: FunctionSpec
    displacement_spec: FunctionSpec
    load_spec: FunctionSpec
    target_spec: FunctionSpec
    v0_spec: FunctionSpec
    optimizer: OptimizerConfig
    out: str | None = None
    vout: str | None = None
    report: str | None = None

    def grid(self) -> Grid:
        return Grid(self.length, self.horizon, self.nx, self.nt)

    def problem(self) -> BeamProblem:
        g = self.grid()
        try:
            return BeamProblem(
                grid=g,
                stiffness=space_field_from_spec(self.stiffness_spec, g, "k"),
                initial_displacement=space_field_from_spec(self.displacement_spec, g, "w"),
                load=spacetime_field_from_spec(self.load_spec, g, "F"),
                target=spacetime_field_from_spec(self.target_spec, g, "y"),
                alpha=self.alpha,
                control_radius=self.control_radius,
            )
        except InvalidStiffnessError as exc:
            raise ConfigError(f"config key 'k': {exc}") from exc

    def initial_control(self) -> SpaceField:
        return space_field_from_spec(self.v0_spec, self.grid(), "v0")


def parse_function_spec(text: str, line: int = 0, col_base: int = 1) -> FunctionSpec:
    """Parse one preset expression; errors carry line and column."""
    tokens = list(re.finditer(r"\S+", text))
    if not tokens:
        raise ConfigError("empty function specifier", line, col_base)
    head = tokens[0]
    kind = head.group()
    if kind not in PRESETS:
        raise ConfigError(
            f"unknown preset {kind!r}; valid: {', '.join(sorted(PRESETS))}",
            line, col_base + head.start())
    schema = PRESETS[kind]
    params = {}
    for tok in tokens[1:]:
        col = col_base + tok.start()
        name, eq, raw = tok.group().partition("=")
        if not eq:
            raise ConfigError(f"expected name=value, got {tok.group()!r}", line, col)
        if name not in schema:
            raise ConfigError(f"preset {kind!r} takes no parameter {name!r}", line, col)
        if name in params:
            raise ConfigError(f"duplicate parameter {name!r}", line, col)
        try:
            params[name] = schema[name](raw)
        except ValueError:
            raise ConfigError(f"bad value {raw!r} for parameter {name!r}", line, col)
    missing = [p for p in schema if p not in params]
    if missing:
        raise ConfigError(
            f"preset {kind!r} is missing parameter(s): {', '.join(missing)}",
            line, col_base + head.start())
    return FunctionSpec(kind, params, line)


def space_field_from_spec(spec: FunctionSpec, grid: Grid, key: str) -> SpaceField:
    if spec.kind in SPACETIME_ONLY:
        raise ConfigError(f"key {key!r} needs a function of x alone, "
                          f"but preset {spec.kind!r} is space-time", spec.line)
    x = grid.x_nodes
    if spec.kind == "zero":
        return SpaceField.zeros(grid)
    if spec.kind == "const":
        return SpaceField(np.full(grid.nx + 1, spec.params["value"]))
    if spec.kind == "sine":
        m, amp = spec.params["m"], spec.params["amp"]
        return SpaceField(amp * np.sin(m * np.pi * x / grid.length))
    if spec.kind == "poly":
        p = spec.params
        return SpaceField(p["c0"] + p["c1"] * x + p["c2"] * x * x)
    if spec.kind == "file":
        from . import fieldio
        return fieldio.read_space_field(spec.params["path"], grid)
    raise ConfigError(f"unhandled preset {spec.kind!r}", spec.line)


def spacetime_field_from_spec(spec: FunctionSpec, grid: Grid, key: str) -> SpaceTimeField:
    if spec.kind in SPACE_ONLY:
        raise ConfigError(f"key {key!r} needs a function of x and t, "
                          f"but preset {spec.kind!r} is space-only", spec.line)
    if spec.kind == "zero":
        return SpaceTimeField.zeros(grid)
    if spec.kind == "const":
        return SpaceTimeField(np.full((grid.nt + 1, grid.nx + 1), spec.params["value"]))
    if spec.kind == "sine_xt":
        m, amp, omega = (spec.params["m"], spec.params["amp"], spec.params["omega"])
        return SpaceTimeField.from_callable(
            grid, lambda x, t: amp * np.sin(m * np.pi * x / grid.length) * np.sin(omega * t))
    if spec.kind == "file":
        from . import fieldio
        return fieldio.read_spacetime_field(spec.params["path"], grid)
    raise ConfigError(f"unhandled preset {spec.kind!r}", spec.line)


def _to_number(key: str, raw: str, line: int, converter):
    try:
        value = converter(raw)
    except ValueError:
        raise ConfigError(f"bad number {raw!r} for key {key!r}", line)
    if not np.isfinite(value):
        raise ConfigError(f"key {key!r} must be finite, got {raw!r}", line)
    return value


def parse_config(text: str) -> RunConfig:
    """Parse and validate a full run configuration from config text."""
    entries = {}  # key -> (raw value, line, value column)
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise ConfigError("expected 'key = value'", lineno)
        key = key.strip()
        value = value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in entries:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        if not value:
            raise ConfigError(f"key {key!r} has no value", lineno)
        col = rawline.index(value, rawline.index("=") + 1) + 1
        entries[key] = (value, lineno, col)

    missing = [k for k in REQUIRED_KEYS if k not in entries]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")

    def scalar(key, converter, check, what, default=None):
        if key not in entries:
            return default
        raw, line, _ = entries[key]
        value = _to_number(key, raw, line, converter)
        if not check(value):
            raise ConfigError(f"key {key!r} must be {what}, got {raw}", line)
        return value

    length = scalar("L", float, lambda v: v > 0, "positive")
    horizon = scalar("T", float, lambda v: v > 0, "positive")
    nx = scalar("Nx", int, lambda v: v >= 4, "an integer >= 4")
    nt = scalar("Nt", int, lambda v: v >= 2, "an integer >= 2")
    alpha = scalar("alpha", float, lambda v: v >= 0, ">= 0")
    v_c = scalar("v_c", float, lambda v: v > 0, "positive")

    specs = {}
    for key in FUNCTION_KEYS:
        if key not in entries:
            specs[key] = FunctionSpec("zero")  # only v0 can be absent
            continue
        raw, line, col = entries[key]
        specs[key] = parse_function_spec(raw, line, col)

    opt_kwargs = {}
    if "step_mode" in entries:
        opt_kwargs["step_mode"] = entries["step_mode"][0]
    for key, conv, check, what in (
        ("step_size", float, lambda v: v > 0, "positive"),
        ("eps", float, lambda v: v > 0, "positive"),
        ("max_iters", int, lambda v: v >= 1, "an integer >= 1"),
        ("power_iters", int, lambda v: v >= 1, "an integer >= 1"),
        ("power_tol", float, lambda v: v > 0, "positive"),
        ("shrink", float, lambda v: 0 < v < 1, "strictly inside (0, 1)"),
        ("seed", int, lambda v: True, "an integer"),
    ):
        value = scalar(key, conv, check, what)
        if value is not None:
            opt_kwargs[key] = value
    optimizer = OptimizerConfig(**opt_kwargs)

    paths = {key: entries[key][0] if key in entries else None for key in PATH_KEYS}

    return RunConfig(
        length=length, horizon=horizon, nx=nx, nt=nt,
        alpha=alpha, control_radius=v_c,
        stiffness_spec=specs["k"], displacement_spec=specs["w"],
        load_spec=specs["F"], target_spec=specs["y"], v0_spec=specs["v0"],
        optimizer=optimizer,
        out=paths["out"], vout=paths["vout"], report=paths["report"],
    )


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config(text)
