import dataclasses
import time

import numpy as np
import pytest

from beamopt import (ConfigError, OptimizerConfig, SpaceField, StepFailureError,
                     cost, estimate_lipschitz, gradient, hessian_apply,
                     inner_space, l2_norm_space, optimize, project_ball,
                     random_smooth_field, solve_forward)
from beamopt.grid import field_from_modes, sine_mode_coefficients

from helpers import canonical_problem


@pytest.fixture(scope="module")
def tracked_problem_200(sine_problem_200):
    """alpha = 0 problem whose target is exactly reachable from v = sin."""
    v = SpaceField.from_callable(sine_problem_200.grid, np.sin)
    u = solve_forward(sine_problem_200, v).displacement
    return dataclasses.replace(sine_problem_200, target=u), v


@pytest.fixture(scope="module")
def recovery_setup():
    """Inverse-crime problem at 100x100 with alpha = 1e-6."""
    base = canonical_problem(100, 100, alpha=1e-6)
    v_true = SpaceField.from_callable(base.grid, np.sin)
    target = solve_forward(base, v_true).displacement
    return dataclasses.replace(base, target=target), v_true


def test_cost_perfect_tracking_is_zero(tracked_problem_200):
    problem, v = tracked_problem_200
    assert cost(problem, v) <= 1e-18


def test_cost_analytic_value(sine_problem_200):
    v = SpaceField.from_callable(sine_problem_200.grid, np.sin)
    # zero target: J = ||sin(x) sin(t)||^2 = (pi/2)^2
    assert cost(sine_problem_200, v) == pytest.approx(np.pi**2 / 4, abs=1e-2)


def test_cost_regularization_term(tracked_problem_200):
    problem, v = tracked_problem_200
    reg = dataclasses.replace(problem, alpha=0.1)
    assert cost(reg, v) == pytest.approx(0.1 * np.pi / 2, abs=1e-3)


def test_gradient_zero_at_reached_target(tracked_problem_200):
    problem, v = tracked_problem_200
    g = gradient(problem, v)
    assert np.max(np.abs(g.values)) == 0.0  # residual is bitwise zero


def test_gradient_analytic_case():
    from beamopt import SpaceTimeField
    p = canonical_problem(200, 200)
    p = dataclasses.replace(
        p, target=SpaceTimeField.from_callable(p.grid, lambda x, t: np.sin(x) + 0.0 * t))
    g = gradient(p, SpaceField.zeros(p.grid))
    exact = -4.0 * np.sin(p.grid.x_nodes)
    assert np.max(np.abs(g.values - exact)) <= 1e-2


def test_gradient_directional_consistency(sine_problem_200):
    p = dataclasses.replace(sine_problem_200, alpha=1e-3)
    rng = np.random.default_rng(21)
    v = random_smooth_field(p.grid, rng)
    dv = random_smooth_field(p.grid, rng)
    pairing = inner_space(gradient(p, v), dv, p.grid)
    for h in (1e-3, 1e-4):
        fd = (cost(p, v + h * dv) - cost(p, v - h * dv)) / (2.0 * h)
        assert abs(pairing - fd) / max(abs(pairing), abs(fd)) <= 1e-3


def test_gradient_fd_mismatch_second_order():
    rng = np.random.default_rng(17)
    cv, cdv = sine_mode_coefficients(rng), sine_mode_coefficients(rng)
    mismatches = []
    for n in (60, 120):
        base = canonical_problem(n, n, alpha=1e-3)
        y = solve_forward(base, SpaceField.from_callable(base.grid, np.sin)).displacement
        p = dataclasses.replace(base, target=y)
        v = field_from_modes(cv, p.grid)
        dv = field_from_modes(cdv, p.grid)
        pairing = inner_space(gradient(p, v), dv, p.grid)
        h = 1e-3
        fd = (cost(p, v + h * dv) - cost(p, v - h * dv)) / (2.0 * h)
        mismatches.append(abs(pairing - fd) / max(abs(pairing), abs(fd)))
    order = np.log2(mismatches[0] / mismatches[1])
    assert 1.5 <= order <= 2.5


def test_hessian_zero():
    p = canonical_problem(20, 16, alpha=0.5)
    out = hessian_apply(p, SpaceField.zeros(p.grid))
    assert np.all(out.values == 0.0)


def test_hessian_coercive():
    p = canonical_problem(100, 100, alpha=0.05)
    rng = np.random.default_rng(5)
    for _ in range(10):
        dv = random_smooth_field(p.grid, rng)
        q = inner_space(hessian_apply(p, dv), dv, p.grid)
        assert q >= 2.0 * p.alpha * l2_norm_space(dv, p.grid) ** 2 - 1e-8


def test_hessian_symmetric():
    p = canonical_problem(100, 100, alpha=1e-3)
    rng = np.random.default_rng(3)
    for _ in range(5):
        a = random_smooth_field(p.grid, rng)
        b = random_smooth_field(p.grid, rng)
        lhs = inner_space(hessian_apply(p, a), b, p.grid)
        rhs = inner_space(a, hessian_apply(p, b), p.grid)
        assert abs(lhs - rhs) <= 5e-3 * max(abs(lhs), abs(rhs))


def test_lipschitz_vanishing_horizon_limit():
    # tiny horizon: the state map contributes nothing, the spectrum is ~2 alpha
    p = canonical_problem(50, 2, horizon=1e-3, alpha=1.0)
    est = estimate_lipschitz(p, OptimizerConfig())
    assert abs(est.value - 2.0) / 2.0 <= 0.05


@pytest.mark.parametrize("alpha", [1e-6, 1e-3, 0.5])
def test_lipschitz_bounded_below_by_regularization(alpha):
    p = canonical_problem(40, 40, alpha=alpha)
    est = estimate_lipschitz(p, OptimizerConfig(power_iters=40))
    assert est.value >= 2.0 * alpha * (1.0 - 1e-6)


def test_lipschitz_nondecreasing_in_horizon():
    values = []
    for horizon, nt in ((1.0, 60), (2.0, 120), (4.0, 240)):
        p = canonical_problem(60, nt, horizon=horizon, alpha=1e-3)
        values.append(estimate_lipschitz(p, OptimizerConfig()).value)
    assert values[0] <= values[1] <= values[2]


def test_lipschitz_degraded_confidence_flag():
    p = canonical_problem(40, 40, alpha=1e-3)
    est = estimate_lipschitz(p, OptimizerConfig(power_iters=1))
    assert not est.converged
    assert est.value > 0


def test_lipschitz_deterministic():
    p = canonical_problem(40, 40, alpha=1e-3)
    cfg = OptimizerConfig(seed=777)
    a = estimate_lipschitz(p, cfg)
    b = estimate_lipschitz(p, cfg)
    assert a.value == b.value and a.iterations == b.iterations


def test_project_ball():
    p = canonical_problem(200, 8, horizon=1.0)
    g = p.grid
    zero = SpaceField.zeros(g)
    assert project_ball(zero, 1.0, g) is zero
    v = SpaceField.from_callable(g, np.sin)
    assert project_ball(v, 2.0, g) is v  # interior point untouched
    projected = project_ball(v, 1.0, g)
    np.testing.assert_allclose(projected.values, 0.79788 * v.values, atol=1e-4)
    again = project_ball(projected, 1.0, g)
    np.testing.assert_allclose(again.values, projected.values, rtol=1e-14)
    with pytest.raises(ConfigError):
        project_ball(v, 0.0, g)


def test_projection_nonexpansive():
    p = canonical_problem(40, 8, horizon=1.0)
    g = p.grid
    rng = np.random.default_rng(8)
    for _ in range(20):
        a = SpaceField(rng.standard_normal(g.nx + 1))
        b = SpaceField(rng.standard_normal(g.nx + 1))
        pa, pb = project_ball(a, 1.0, g), project_ball(b, 1.0, g)
        assert l2_norm_space(pa - pb, g) <= l2_norm_space(a - b, g) * (1 + 1e-12)


def test_optimize_already_optimal(tracked_problem_200):
    problem, v_star = tracked_problem_200
    report = optimize(problem, OptimizerConfig(), v_star)
    assert report.termination == "stationary-gradient"
    assert report.iterates == 0


def test_optimize_recovers_control(recovery_setup):
    problem, v_true = recovery_setup
    cfg = OptimizerConfig()
    started = time.time()
    report = optimize(problem, cfg, SpaceField.zeros(problem.grid))
    elapsed = time.time() - started
    g = problem.grid
    assert report.final_cost <= 1e-4 * report.cost_history[0]
    rel = (l2_norm_space(report.final_control - v_true, g)
           / l2_norm_space(v_true, g))
    assert rel <= 0.1
    assert report.iterates <= 500
    assert np.all(np.diff(report.cost_history) < 0.0)
    assert report.backtrack_rejections == 0
    assert report.lipschitz_used is not None
    assert np.all(report.step_history[1:] == 1.0 / report.lipschitz_used)
    assert elapsed <= 120.0


def test_optimize_active_constraint(recovery_setup):
    problem, v_true = recovery_setup
    constrained = dataclasses.replace(problem, control_radius=0.5)
    report = optimize(constrained, OptimizerConfig(), SpaceField.zeros(problem.grid))
    norm = l2_norm_space(report.final_control, problem.grid)
    assert abs(norm - 0.5) <= 1e-6
    from beamopt import check_variational_inequality
    rec = check_variational_inequality(constrained, report.final_control, seed=42)
    assert rec.passed


def test_optimize_fixed_mode_and_step_failure(recovery_setup):
    problem, _ = recovery_setup
    small = OptimizerConfig(step_mode="fixed", step_size=0.05, max_iters=3)
    report = optimize(problem, small, SpaceField.zeros(problem.grid))
    assert report.termination == "max-iters"
    assert report.lipschitz_used is None
    assert np.all(np.diff(report.cost_history) < 0.0)
    huge = OptimizerConfig(step_mode="fixed", step_size=1e6)
    with pytest.raises(StepFailureError):
        optimize(problem, huge, SpaceField.zeros(problem.grid))


def test_optimize_backtracking_mode(recovery_setup):
    problem, v_true = recovery_setup
    cfg = OptimizerConfig(step_mode="backtracking", step_size=2.0, max_iters=100)
    report = optimize(problem, cfg, SpaceField.zeros(problem.grid))
    assert np.all(np.diff(report.cost_history) < 0.0)
    assert report.final_cost <= 1e-2 * report.cost_history[0]


def test_gradient_lipschitz_property(recovery_setup):
    problem, _ = recovery_setup
    p = dataclasses.replace(problem, alpha=1e-3)
    est = estimate_lipschitz(p, OptimizerConfig())
    rng = np.random.default_rng(11)
    for _ in range(20):
        v = random_smooth_field(p.grid, rng)
        dv = random_smooth_field(p.grid, rng)
        change = l2_norm_space(gradient(p, v + dv) - gradient(p, v), p.grid)
        assert change <= est.value * (1.0 + 5e-3) * l2_norm_space(dv, p.grid)


@pytest.mark.parametrize("kwargs", [
    dict(step_mode="newton"),
    dict(eps=0.0),
    dict(max_iters=0),
    dict(power_iters=0),
    dict(shrink=1.0),
    dict(shrink=0.0),
    dict(step_size=-1.0),
    dict(power_tol=0.0),
])
def test_optimizer_config_validation(kwargs):
    with pytest.raises(ConfigError):
        OptimizerConfig(**kwargs)
