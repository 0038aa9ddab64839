"""Uniform space-time grids, nodal fields, and trapezoid quadrature.

All computations run in 64-bit floating point; the identity checks elsewhere
in the package rely on 1e-8 .. 1e-12 residuals, which rules out single
precision. Fields store boundary nodes explicitly even though the boundary
values are pinned to zero by the boundary conditions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError, FieldShapeError


@dataclass(frozen=True)
class Grid:
    """Uniform grid on (0, length) x (0, horizon) with nx/nt intervals."""

    length: float
    horizon: float
    nx: int
    nt: int

    def __post_init__(self):
        if not (np.isfinite(self.length) and self.length > 0):
            raise ConfigError(f"beam length must be positive and finite, got {self.length}")
        if not (np.isfinite(self.horizon) and self.horizon > 0):
            raise ConfigError(f"time horizon must be positive and finite, got {self.horizon}")
        if int(self.nx) != self.nx or self.nx < 4:
            raise ConfigError(f"Nx must be an integer >= 4, got {self.nx}")
        if int(self.nt) != self.nt or self.nt < 2:
            raise ConfigError(f"Nt must be an integer >= 2, got {self.nt}")
        object.__setattr__(self, "nx", int(self.nx))
        object.__setattr__(self, "nt", int(self.nt))

    @property
    def dx(self) -> float:
        return self.length / self.nx

    @property
    def dt(self) -> float:
        return self.horizon / self.nt

    @cached_property
    def x_nodes(self) -> np.ndarray:
        x = np.linspace(0.0, self.length, self.nx + 1)
        x.setflags(write=False)
        return x

    @cached_property
    def t_nodes(self) -> np.ndarray:
        t = np.linspace(0.0, self.horizon, self.nt + 1)
        t.setflags(write=False)
        return t

    @cached_property
    def space_weights(self) -> np.ndarray:
        # composite trapezoid: half weight on the two boundary nodes
        w = np.full(self.nx + 1, self.dx)
        w[0] *= 0.5
        w[-1] *= 0.5
        w.setflags(write=False)
        return w

    @cached_property
    def time_weights(self) -> np.ndarray:
        w = np.full(self.nt + 1, self.dt)
        w[0] *= 0.5
        w[-1] *= 0.5
        w.setflags(write=False)
        return w

    def check_space(self, f: "SpaceField"):
        if f.values.shape != (self.nx + 1,):
            raise FieldShapeError(
                f"space field has {f.values.shape[0]} nodes, grid expects {self.nx + 1}"
            )

    def check_spacetime(self, f: "SpaceTimeField"):
        if f.values.shape != (self.nt + 1, self.nx + 1):
            raise FieldShapeError(
                f"space-time field has shape {f.values.shape}, "
                f"grid expects {(self.nt + 1, self.nx + 1)}"
            )


def _frozen_array(values, ndim: int) -> np.ndarray:
    vals = np.array(values, dtype=float)
    if vals.ndim != ndim:
        raise FieldShapeError(f"expected a {ndim}-d array of values, got ndim={vals.ndim}")
    if not np.all(np.isfinite(vals)):
        raise FieldShapeError("field contains non-finite entries")
    vals.setflags(write=False)
    return vals


@dataclass(frozen=True, eq=False)
class SpaceField:
    """Function of x sampled at the nx+1 grid nodes. Immutable."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values, 1))

    @classmethod
    def zeros(cls, grid: Grid) -> "SpaceField":
        return cls(np.zeros(grid.nx + 1))

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> "SpaceField":
        return cls(np.asarray(fn(grid.x_nodes), dtype=float))

    def __add__(self, other: "SpaceField") -> "SpaceField":
        return SpaceField(self.values + other.values)

    def __sub__(self, other: "SpaceField") -> "SpaceField":
        return SpaceField(self.values - other.values)

    def __mul__(self, scalar: float) -> "SpaceField":
        return SpaceField(self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "SpaceField":
        return SpaceField(-self.values)


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Function of (x, t) sampled on the full grid, entry (n, i) at (x_i, t_n)."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values, 2))

    @classmethod
    def zeros(cls, grid: Grid) -> "SpaceTimeField":
        return cls(np.zeros((grid.nt + 1, grid.nx + 1)))

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> "SpaceTimeField":
        x = grid.x_nodes[None, :]
        t = grid.t_nodes[:, None]
        return cls(np.broadcast_to(fn(x, t), (grid.nt + 1, grid.nx + 1)).copy())

    def __add__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        return SpaceTimeField(self.values + other.values)

    def __sub__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        return SpaceTimeField(self.values - other.values)

    def __mul__(self, scalar: float) -> "SpaceTimeField":
        return SpaceTimeField(self.values * float(scalar))

    __rmul__ = __mul__


def integrate_space(f: SpaceField, grid: Grid) -> float:
    """Trapezoid approximation of the integral of f over (0, length)."""
    grid.check_space(f)
    return float(np.dot(grid.space_weights, f.values))


def inner_space(f: SpaceField, h: SpaceField, grid: Grid) -> float:
    """Trapezoid-weighted inner product on (0, length)."""
    grid.check_space(f)
    grid.check_space(h)
    return float(np.dot(grid.space_weights * f.values, h.values))


def l2_norm_space(f: SpaceField, grid: Grid) -> float:
    return float(np.sqrt(max(inner_space(f, f, grid), 0.0)))


def inner_spacetime(f: SpaceTimeField, h: SpaceTimeField, grid: Grid) -> float:
    """Tensor-product trapezoid inner product over (0, length) x (0, horizon)."""
    grid.check_spacetime(f)
    grid.check_spacetime(h)
    return float(np.einsum("n,ni,ni,i->", grid.time_weights, f.values, h.values,
                           grid.space_weights))


def l2_norm_spacetime(f: SpaceTimeField, grid: Grid) -> float:
    return float(np.sqrt(max(inner_spacetime(f, f, grid), 0.0)))


def sine_mode_coefficients(rng: np.random.Generator, modes: int = 8,
                           decay: float = 2.0) -> np.ndarray:
    """Random coefficients c_m = U(-1,1)/m**decay for the first `modes` sine modes."""
    m = np.arange(1, modes + 1, dtype=float)
    return rng.uniform(-1.0, 1.0, size=modes) / m**decay


def field_from_modes(coeffs: np.ndarray, grid: Grid) -> SpaceField:
    """Evaluate sum_m c_m sin(m pi x / length) at the grid nodes."""
    x = grid.x_nodes
    out = np.zeros_like(x)
    for m, c in enumerate(coeffs, start=1):
        out += c * np.sin(m * np.pi * x / grid.length)
    return SpaceField(out)


def random_smooth_field(grid: Grid, rng: np.random.Generator, modes: int = 8,
                        decay: float = 2.0) -> SpaceField:
    """Smooth low-frequency random field vanishing at both ends."""
    return field_from_modes(sine_mode_coefficients(rng, modes, decay), grid)
