"""Time integration of the beam equation u_tt + (k u_xx)_xx = F.

The marcher is Newmark with beta = 1/4, gamma = 1/2 (average acceleration):
unconditionally stable, second order, and exactly energy-conserving for this
linear undamped system, so no dt = O(dx^2) restriction applies despite the
fourth-order spatial operator. The per-step system (I + beta dt^2 B) a = rhs
is factored once per problem and reused across all steps and solves.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded, LinAlgError

from .errors import (DivergenceError, ConfigError, FieldShapeError,
                     InvalidStiffnessError, NumericalFailureError)
from .grid import Grid, SpaceField, SpaceTimeField, inner_space
from .operators import BendingOperator, assemble_bending, nodal_curvature

NEWMARK_BETA = 0.25
NEWMARK_GAMMA = 0.5


@dataclass(frozen=True, eq=False)
class BeamProblem:
    """All data of one control problem bound to a grid.

    stiffness k must be strictly positive, the initial displacement must be
    compatible with the pinned ends, alpha is the regularization weight of
    the tracking cost, and control_radius bounds the admissible initial
    velocities in the L2 norm.
    """

    grid: Grid
    stiffness: SpaceField
    initial_displacement: SpaceField
    load: SpaceTimeField
    target: SpaceTimeField
    alpha: float
    control_radius: float

    def __post_init__(self):
        g = self.grid
        g.check_space(self.stiffness)
        g.check_space(self.initial_displacement)
        g.check_spacetime(self.load)
        g.check_spacetime(self.target)
        kv = self.stiffness.values
        if np.any(kv <= 0.0):
            bad = int(np.argmax(kv <= 0.0))
            raise InvalidStiffnessError(
                f"stiffness must be strictly positive at every node; k[{bad}] = {kv[bad]}"
            )
        w = self.initial_displacement.values
        scale = max(1.0, float(np.max(np.abs(w))))
        if abs(w[0]) > 1e-12 * scale or abs(w[-1]) > 1e-12 * scale:
            raise FieldShapeError(
                f"initial displacement must vanish at both ends, got "
                f"({w[0]:.3e}, {w[-1]:.3e})"
            )
        if not (np.isfinite(self.alpha) and self.alpha >= 0.0):
            raise ConfigError(f"alpha must be finite and >= 0, got {self.alpha}")
        if not (np.isfinite(self.control_radius) and self.control_radius > 0.0):
            raise ConfigError(f"v_c must be finite and > 0, got {self.control_radius}")

    @cached_property
    def bending(self) -> BendingOperator:
        return assemble_bending(self.stiffness, self.grid)

    @cached_property
    def stepper(self) -> "_NewmarkStepper":
        return _NewmarkStepper(self.bending, self.grid.dt)


@dataclass(frozen=True, eq=False)
class EvolutionState:
    """Trajectory of one march: displacement plus internal velocity/acceleration."""

    displacement: SpaceTimeField
    velocity: np.ndarray      # (nt+1, nx+1), u_t at each level
    acceleration: np.ndarray  # (nt+1, nx+1)


class _NewmarkStepper:
    """Holds the banded Cholesky factor of I + beta dt^2 B for reuse."""

    def __init__(self, bending: BendingOperator, dt: float):
        self.bending = bending
        self.grid = bending.grid
        self.dt = dt
        try:
            self.factor = cholesky_banded(
                bending.shifted_upper_banded(NEWMARK_BETA * dt * dt))
        except LinAlgError as exc:  # cannot occur for PSD B, but guarded
            raise NumericalFailureError(f"step system factorization failed: {exc}") from exc

    def march(self, load: np.ndarray, w: np.ndarray, v: np.ndarray):
        """Integrate nt steps from u(.,0) = w, u_t(.,0) = v under the given load.

        load has shape (nt+1, nx+1) sampled at whole time levels; boundary
        columns of the state stay identically zero.
        """
        g, dt = self.grid, self.dt
        nx, nt = g.nx, g.nt
        u = np.zeros((nt + 1, nx + 1))
        vel = np.zeros((nt + 1, nx + 1))
        acc = np.zeros((nt + 1, nx + 1))
        u[0], vel[0] = w, v
        # starting acceleration forced by the scheme: a0 = F(.,0) - B w
        acc[0, 1:-1] = load[0, 1:-1] - self.bending.apply_interior(w[1:-1])
        for n in range(nt):
            pred = (u[n, 1:-1] + dt * vel[n, 1:-1]
                    + dt * dt * (0.5 - NEWMARK_BETA) * acc[n, 1:-1])
            rhs = load[n + 1, 1:-1] - self.bending.apply_interior(pred)
            if not np.all(np.isfinite(rhs)):
                raise DivergenceError(f"non-finite values at time level {n + 1}")
            a_new = cho_solve_banded((self.factor, False), rhs, check_finite=False)
            if not np.all(np.isfinite(a_new)):
                raise DivergenceError(f"non-finite values at time level {n + 1}")
            u[n + 1, 1:-1] = pred + NEWMARK_BETA * dt * dt * a_new
            vel[n + 1, 1:-1] = vel[n, 1:-1] + dt * (
                (1.0 - NEWMARK_GAMMA) * acc[n, 1:-1] + NEWMARK_GAMMA * a_new)
            acc[n + 1, 1:-1] = a_new
        return u, vel, acc


def solve_forward(problem: BeamProblem, v: SpaceField) -> EvolutionState:
    """Solve the beam equation with initial velocity v and the problem's data."""
    problem.grid.check_space(v)
    u, vel, acc = problem.stepper.march(
        problem.load.values, problem.initial_displacement.values, v.values)
    return EvolutionState(SpaceTimeField(u), vel, acc)


def solve_difference(problem: BeamProblem, dv: SpaceField) -> EvolutionState:
    """Homogeneous solve (no load, zero initial displacement) with velocity dv.

    By linearity of the scheme this is the state increment
    solve_forward(p, v + dv) - solve_forward(p, v) for any v.
    """
    problem.grid.check_space(dv)
    g = problem.grid
    zero_load = np.zeros((g.nt + 1, g.nx + 1))
    u, vel, acc = problem.stepper.march(zero_load, np.zeros(g.nx + 1), dv.values)
    return EvolutionState(SpaceTimeField(u), vel, acc)


def energy_series(state: EvolutionState, problem: BeamProblem) -> np.ndarray:
    """Discrete energy 0.5 * integral(u_t^2 + k u_xx^2) at every time level."""
    g = problem.grid
    g.check_spacetime(state.displacement)
    kv = problem.stiffness.values
    out = np.empty(g.nt + 1)
    for n in range(g.nt + 1):
        c = nodal_curvature(state.displacement.values[n], g)
        vel = SpaceField(state.velocity[n])
        bend = SpaceField(kv * c * c)
        out[n] = 0.5 * (inner_space(vel, vel, g)
                        + float(np.dot(g.space_weights, bend.values)))
    return out
