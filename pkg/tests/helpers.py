"""Shared builders for test problems."""

import numpy as np

from beamopt import BeamProblem, Grid, SpaceField, SpaceTimeField


def canonical_problem(nx, nt, length=np.pi, horizon=np.pi, alpha=0.0,
                      control_radius=10.0, target=None, load=None, stiffness=None,
                      initial_displacement=None) -> BeamProblem:
    """Unit-stiffness problem on (0, length) x (0, horizon) with zero data."""
    g = Grid(length, horizon, nx, nt)
    return BeamProblem(
        grid=g,
        stiffness=stiffness if stiffness is not None else SpaceField(np.ones(g.nx + 1)),
        initial_displacement=(initial_displacement if initial_displacement is not None
                              else SpaceField.zeros(g)),
        load=load if load is not None else SpaceTimeField.zeros(g),
        target=target if target is not None else SpaceTimeField.zeros(g),
        alpha=alpha,
        control_radius=control_radius,
    )


def sine_exact(grid) -> SpaceTimeField:
    """Closed-form trajectory sin(x) sin(t) for unit stiffness on (0,pi)."""
    return SpaceTimeField.from_callable(grid, lambda x, t: np.sin(x) * np.sin(t))


def mms_problem(nx, nt) -> BeamProblem:
    """Problem manufactured so the exact trajectory is sin(x) * t^2."""
    g = Grid(np.pi, np.pi, nx, nt)
    load = SpaceTimeField.from_callable(g, lambda x, t: (2.0 + t * t) * np.sin(x))
    return canonical_problem(nx, nt, load=load)
