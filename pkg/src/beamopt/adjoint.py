"""Backward-in-time costate solves driven by the tracking residual.

The costate problem has final conditions at t = horizon; substituting
t -> horizon - t turns it into a forward problem of the same type, so the
same Newmark marcher serves both. Sources are formed at whole time levels
and reversed by index flip, no interpolation. This is the
continuous-adjoint-then-discretize route: identity and gradient checks hold
to discretization order rather than machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import BeamProblem
from .grid import SpaceField, SpaceTimeField


@dataclass(frozen=True, eq=False)
class AdjointState:
    """Costate trajectory and its t = 0 trace (the gradient ingredient)."""

    costate: SpaceTimeField
    trace_at_zero: SpaceField


def _solve_backward(problem: BeamProblem, source: np.ndarray) -> AdjointState:
    g = problem.grid
    zeros = np.zeros(g.nx + 1)
    u, _, _ = problem.stepper.march(source[::-1], zeros, zeros)
    costate = u[::-1].copy()
    return AdjointState(SpaceTimeField(costate), SpaceField(costate[0]))


def solve_adjoint(problem: BeamProblem, u: SpaceTimeField) -> AdjointState:
    """Costate of the tracking cost at state u: source -2(u - target)."""
    problem.grid.check_spacetime(u)
    return _solve_backward(problem, -2.0 * (u.values - problem.target.values))


def solve_adjoint_difference(problem: BeamProblem, du: SpaceTimeField) -> AdjointState:
    """Costate increment driven by a state increment du: source -2 du."""
    problem.grid.check_spacetime(du)
    return _solve_backward(problem, -2.0 * du.values)
