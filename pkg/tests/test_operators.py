import numpy as np
import pytest

from beamopt import (FieldShapeError, Grid, InvalidStiffnessError, SpaceField,
                     apply_bending, assemble_bending, inner_space)


def dense_oracle(k_values, grid):
    """Independent assembly: explicit T diag(k) T / dx^4 with T = tridiag(1,-2,1)."""
    n = grid.nx - 1
    T = (np.diag(np.full(n, -2.0)) + np.diag(np.ones(n - 1), 1)
         + np.diag(np.ones(n - 1), -1))
    return T @ np.diag(k_values[1:-1]) @ T / grid.dx**4


def test_uniform_stiffness_stencil_nx4():
    g = Grid(1.0, 1.0, 4, 2)
    op = assemble_bending(SpaceField(np.ones(5)), g)
    expected = np.array([[5.0, -4.0, 1.0],
                         [-4.0, 6.0, -4.0],
                         [1.0, -4.0, 5.0]]) / g.dx**4
    np.testing.assert_allclose(op.as_dense(), expected, rtol=1e-14)


@pytest.mark.parametrize("nx", [4, 5, 9])
def test_variable_stiffness_matches_dense_oracle(nx):
    g = Grid(2.0, 1.0, nx, 2)
    rng = np.random.default_rng(nx)
    k = SpaceField(0.5 + rng.random(nx + 1))
    op = assemble_bending(k, g)
    np.testing.assert_allclose(op.as_dense(), dense_oracle(k.values, g), rtol=1e-13)
    f = rng.standard_normal(nx - 1)
    np.testing.assert_allclose(op.apply_interior(f),
                               dense_oracle(k.values, g) @ f, rtol=1e-12, atol=1e-12)


def test_apply_zero_field():
    g = Grid(1.0, 1.0, 8, 2)
    op = assemble_bending(SpaceField(np.ones(9)), g)
    out = apply_bending(op, SpaceField.zeros(g))
    assert np.all(out.values == 0.0)


def test_sine_is_discrete_eigenvector():
    # unit stiffness on (0,pi): sin(m x) has eigenvalue 16 sin^4(m dx/2)/dx^4
    g = Grid(np.pi, 1.0, 64, 2)
    op = assemble_bending(SpaceField(np.ones(65)), g)
    for m in (1, 3):
        f = SpaceField(np.sin(m * g.x_nodes))
        lam = 16.0 * np.sin(m * g.dx / 2.0) ** 4 / g.dx**4
        # rounding in the sin samples is amplified by 1/dx^4
        np.testing.assert_allclose(apply_bending(op, f).values, lam * f.values,
                                   atol=1e-8 * lam)


def test_eigenvalue_tends_to_fourth_power():
    m = 2
    g = Grid(np.pi, 1.0, 256, 2)
    lam = 16.0 * np.sin(m * g.dx / 2.0) ** 4 / g.dx**4
    assert abs(lam - m**4) / m**4 <= 1e-3


def test_consistency_with_fourth_derivative():
    # f = sin(x) satisfies f = f'' = 0 at the ends; B f -> f'''' at order 2
    errors = []
    for n in (32, 64, 128):
        g = Grid(np.pi, 1.0, n, 2)
        op = assemble_bending(SpaceField(np.ones(n + 1)), g)
        out = apply_bending(op, SpaceField.from_callable(g, np.sin))
        errors.append(np.max(np.abs(out.values - np.sin(g.x_nodes))))
    orders = [np.log2(a / b) for a, b in zip(errors[:-1], errors[1:])]
    assert all(1.7 <= o <= 2.3 for o in orders)


def test_linearity():
    g = Grid(1.0, 1.0, 20, 2)
    rng = np.random.default_rng(1)
    op = assemble_bending(SpaceField(0.5 + rng.random(21)), g)
    f = np.zeros(21)
    h = np.zeros(21)
    f[1:-1] = rng.standard_normal(19)
    h[1:-1] = rng.standard_normal(19)
    lhs = apply_bending(op, SpaceField(2.0 * f - 3.0 * h)).values
    rhs = (2.0 * apply_bending(op, SpaceField(f)).values
           - 3.0 * apply_bending(op, SpaceField(h)).values)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_symmetry_in_weighted_inner_product():
    g = Grid(2.0, 1.0, 40, 2)
    rng = np.random.default_rng(3)
    op = assemble_bending(SpaceField(0.5 + rng.random(41)), g)
    for _ in range(10):
        f = np.zeros(41)
        h = np.zeros(41)
        f[1:-1] = rng.standard_normal(39)
        h[1:-1] = rng.standard_normal(39)
        lhs = inner_space(apply_bending(op, SpaceField(f)), SpaceField(h), g)
        rhs = inner_space(SpaceField(f), apply_bending(op, SpaceField(h)), g)
        assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs))


def test_positive_semidefinite():
    g = Grid(2.0, 1.0, 40, 2)
    rng = np.random.default_rng(4)
    op = assemble_bending(SpaceField(0.5 + rng.random(41)), g)
    dense = op.as_dense()
    eigs = np.linalg.eigvalsh(dense)
    assert eigs[0] >= -1e-10 * eigs[-1]
    for _ in range(20):
        x = rng.standard_normal(g.nx - 1)
        assert x @ (dense @ x) >= -1e-10 * (x @ x) * eigs[-1]


def test_rejects_nonpositive_stiffness():
    g = Grid(1.0, 1.0, 8, 2)
    k = np.ones(9)
    k[3] = 0.0
    with pytest.raises(InvalidStiffnessError):
        assemble_bending(SpaceField(k), g)
    k[3] = -2.0
    with pytest.raises(InvalidStiffnessError):
        assemble_bending(SpaceField(k), g)


def test_rejects_nan_stiffness_at_field_construction():
    k = np.ones(9)
    k[3] = np.nan
    with pytest.raises(FieldShapeError):
        SpaceField(k)


def test_rejects_nonzero_boundary_values():
    g = Grid(1.0, 1.0, 8, 2)
    op = assemble_bending(SpaceField(np.ones(9)), g)
    f = np.zeros(9)
    f[0] = 1e-6
    with pytest.raises(FieldShapeError):
        apply_bending(op, SpaceField(f))
