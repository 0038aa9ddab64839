"""Cost functional, its gradient, and projected gradient descent.

The descent update is v <- project(v - beta * grad) where project is the
exact radial projection onto the admissible L2 ball. The default step size
is the inverse of the gradient's Lipschitz constant, estimated by power
iteration on the Hessian action; a backtracking fallback guards the descent
requirement, and a fixed-step mode is available for experiments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .adjoint import solve_adjoint, solve_adjoint_difference
from .dynamics import BeamProblem, EvolutionState, solve_difference, solve_forward
from .errors import ConfigError, StepFailureError
from .grid import (Grid, SpaceField, inner_space, l2_norm_space, l2_norm_spacetime,
                   random_smooth_field)

STEP_MODES = ("inverse-lipschitz", "fixed", "backtracking")
STATIONARY_RTOL = 1e-12
MAX_SHRINKS = 60
DEFAULT_SEED = 20250612


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs of the descent loop and of the Lipschitz power iteration."""

    step_mode: str = "inverse-lipschitz"
    step_size: float = 1.0          # fixed mode; also the backtracking start size
    eps: float = 1e-6               # stop when ||v_next - v|| <= eps
    max_iters: int = 500
    power_iters: int = 100
    power_tol: float = 1e-8
    shrink: float = 0.5
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.step_mode not in STEP_MODES:
            raise ConfigError(f"step_mode must be one of {STEP_MODES}, got {self.step_mode!r}")
        if not (np.isfinite(self.step_size) and self.step_size > 0):
            raise ConfigError(f"step_size must be positive, got {self.step_size}")
        if not (np.isfinite(self.eps) and self.eps > 0):
            raise ConfigError(f"eps must be positive, got {self.eps}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.power_iters < 1:
            raise ConfigError(f"power_iters must be >= 1, got {self.power_iters}")
        if not (np.isfinite(self.power_tol) and self.power_tol > 0):
            raise ConfigError(f"power_tol must be positive, got {self.power_tol}")
        if not (0.0 < self.shrink < 1.0):
            raise ConfigError(f"shrink factor must lie strictly in (0, 1), got {self.shrink}")


@dataclass(frozen=True, eq=False)
class LipschitzEstimate:
    """Dominant-eigenvalue estimate of the Hessian action."""

    value: float
    residual: float      # ||H x - value * x|| / value at the final vector
    iterations: int
    converged: bool      # False means the estimate is degraded-confidence
    seed: int

    def __float__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class OptimizationReport:
    """History and outcome of one descent run."""

    iterates: int
    cost_history: np.ndarray
    grad_norm_history: np.ndarray
    step_history: np.ndarray      # step used to reach iterate k; 0 for the start
    final_control: SpaceField
    final_cost: float
    termination: str              # tolerance-met | max-iters | stationary-gradient
    lipschitz_used: Optional[float] = None
    backtrack_rejections: int = 0
    seed: int = DEFAULT_SEED


def _forward_cost(problem: BeamProblem, v: SpaceField):
    state = solve_forward(problem, v)
    residual = state.displacement - problem.target
    j = (l2_norm_spacetime(residual, problem.grid) ** 2
         + problem.alpha * l2_norm_space(v, problem.grid) ** 2)
    return state, j


def _gradient_from_state(problem: BeamProblem, state: EvolutionState,
                         v: SpaceField) -> SpaceField:
    adj = solve_adjoint(problem, state.displacement)
    return -1.0 * adj.trace_at_zero + (2.0 * problem.alpha) * v


def cost(problem: BeamProblem, v: SpaceField) -> float:
    """Tracking misfit plus alpha times the squared control norm."""
    return _forward_cost(problem, v)[1]


def gradient(problem: BeamProblem, v: SpaceField) -> SpaceField:
    """Descent-ready gradient: minus the costate trace at t = 0 plus 2 alpha v."""
    state, _ = _forward_cost(problem, v)
    return _gradient_from_state(problem, state, v)


def hessian_apply(problem: BeamProblem, dv: SpaceField) -> SpaceField:
    """Gradient increment for a control increment dv; independent of v by linearity."""
    du = solve_difference(problem, dv)
    dadj = solve_adjoint_difference(problem, du.displacement)
    return -1.0 * dadj.trace_at_zero + (2.0 * problem.alpha) * dv


def project_ball(v: SpaceField, radius: float, grid: Grid) -> SpaceField:
    """Exact projection onto the L2 ball of the given radius (radial scaling)."""
    if not (np.isfinite(radius) and radius > 0):
        raise ConfigError(f"projection radius must be positive, got {radius}")
    norm = l2_norm_space(v, grid)
    if norm <= radius:
        return v
    return v * (radius / norm)


def estimate_lipschitz(problem: BeamProblem, cfg: OptimizerConfig) -> LipschitzEstimate:
    """Power iteration on the Hessian action with Rayleigh-quotient estimates.

    Deterministic for a given cfg.seed. The spectrum is bounded below by
    2*alpha, so the returned value is floored there.
    """
    g = problem.grid
    rng = np.random.default_rng(cfg.seed)
    x = random_smooth_field(g, rng)
    nrm = l2_norm_space(x, g)
    x = x * (1.0 / nrm)
    value = 0.0
    residual = np.inf
    converged = False
    iterations = 0
    for iterations in range(1, cfg.power_iters + 1):
        hx = hessian_apply(problem, x)
        rayleigh = inner_space(x, hx, g)
        hx_norm = l2_norm_space(hx, g)
        if hx_norm <= 1e-300:  # operator numerically zero; alpha floor below
            value, residual, converged = max(rayleigh, 0.0), 0.0, True
            break
        residual = l2_norm_space(hx - rayleigh * x, g) / max(abs(rayleigh), 1e-300)
        drift = abs(rayleigh - value)
        value = rayleigh
        x = hx * (1.0 / hx_norm)
        if iterations > 1 and drift <= cfg.power_tol * max(abs(value), 1e-300):
            converged = True
            break
    return LipschitzEstimate(value=max(value, 2.0 * problem.alpha),
                             residual=residual, iterations=iterations,
                             converged=converged, seed=cfg.seed)


def optimize(problem: BeamProblem, cfg: OptimizerConfig,
             v0: SpaceField) -> OptimizationReport:
    """Projected gradient descent from v0 until the iterate change is <= eps.

    Every accepted step strictly decreases the cost (ties only at
    termination); a step that cannot produce descent after MAX_SHRINKS
    halvings raises StepFailureError naming the iterate.
    """
    g = problem.grid
    g.check_space(v0)
    v = project_ball(v0, problem.control_radius, g)

    lipschitz = None
    if cfg.step_mode == "inverse-lipschitz":
        lipschitz = estimate_lipschitz(problem, cfg)
        base_step = 1.0 / max(lipschitz.value, 1e-300)
    else:
        base_step = cfg.step_size

    state, j = _forward_cost(problem, v)
    grad = _gradient_from_state(problem, state, v)
    costs = [j]
    grad_norms = [l2_norm_space(grad, g)]
    steps = [0.0]
    rejections = 0
    termination = "max-iters"

    for it in range(1, cfg.max_iters + 1):
        gnorm = grad_norms[-1]
        if gnorm <= STATIONARY_RTOL * max(1.0, l2_norm_space(v, g)):
            termination = "stationary-gradient"
            break
        beta = base_step
        shrinks = 0
        accepted = False
        while True:
            cand = project_ball(v - beta * grad, problem.control_radius, g)
            delta = l2_norm_space(cand - v, g)
            cand_state, cand_j = _forward_cost(problem, cand)
            if cand_j < j:
                accepted = True
                break
            if delta <= cfg.eps:
                # update would move less than eps and cannot descend any
                # further in floating point: the current iterate is final
                break
            if cfg.step_mode == "fixed" or shrinks >= MAX_SHRINKS:
                raise StepFailureError(
                    f"no descent step found at iterate {it} "
                    f"(cost {j:.6e}, candidate {cand_j:.6e}, step {beta:.3e})")
            beta *= cfg.shrink
            shrinks += 1
            rejections += 1
        if not accepted:
            termination = "tolerance-met"
            break
        v, state, j = cand, cand_state, cand_j
        grad = _gradient_from_state(problem, state, v)
        costs.append(j)
        grad_norms.append(l2_norm_space(grad, g))
        steps.append(beta)
        if delta <= cfg.eps:
            termination = "tolerance-met"
            break

    return OptimizationReport(
        iterates=len(costs) - 1,
        cost_history=np.asarray(costs),
        grad_norm_history=np.asarray(grad_norms),
        step_history=np.asarray(steps),
        final_control=v,
        final_cost=costs[-1],
        termination=termination,
        lipschitz_used=None if lipschitz is None else lipschitz.value,
        backtrack_rejections=rejections,
        seed=cfg.seed,
    )
