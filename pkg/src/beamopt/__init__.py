"""Optimal initial-velocity control of a simply supported Euler-Bernoulli beam.

The package solves u_tt + (k(x) u_xx)_xx = F on (0,L)x(0,T) with pinned,
moment-free ends, and finds the initial velocity v(x) whose trajectory best
tracks a target displacement in the least-squares sense, by projected
gradient descent driven by a costate solve.
"""

from .adjoint import AdjointState, solve_adjoint, solve_adjoint_difference
from .config import FunctionSpec, RunConfig, load_config, parse_config
from .control import (LipschitzEstimate, OptimizationReport, OptimizerConfig, cost,
                      estimate_lipschitz, gradient, hessian_apply, optimize,
                      project_ball)
from .dynamics import (BeamProblem, EvolutionState, energy_series, solve_difference,
                       solve_forward)
from .errors import (BeamOptError, ConfigError, DivergenceError, FieldIOError,
                     FieldShapeError, GridMismatchError, InvalidStiffnessError,
                     NumericalFailureError, StepFailureError)
from .grid import (Grid, SpaceField, SpaceTimeField, inner_space, inner_spacetime,
                   integrate_space, l2_norm_space, l2_norm_spacetime,
                   random_smooth_field)
from .operators import BendingOperator, apply_bending, assemble_bending
from .verify import (CheckRecord, VerificationReport, check_adjoint_identity,
                     check_energy_identity, check_gradient_fd,
                     check_variational_inequality, convergence_study, run_suite)

__version__ = "0.1.0"
