"""Discrete bending operator for a simply supported beam.

The operator approximates (k(x) u_xx)_xx on interior nodes under the
boundary conditions u = u_xx = 0 at both ends. It is assembled in the
conservative factored form D2^T diag(k) D2 / dx^4 (D2 = second difference),
which keeps it symmetric positive semidefinite for any positive k; the
adjoint identity checks rely on that symmetry. The zero-moment end
condition enters as the mirror-odd ghost closure u_{-1} = -u_1, which makes
the nodal curvature vanish at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FieldShapeError, InvalidStiffnessError
from .grid import Grid, SpaceField

BOUNDARY_TOL = 1e-12


def nodal_curvature(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Second difference of a boundary-pinned nodal row; zero at both ends."""
    c = np.zeros_like(values)
    c[1:-1] = (values[:-2] - 2.0 * values[1:-1] + values[2:]) / grid.dx**2
    return c


@dataclass(frozen=True, eq=False)
class BendingOperator:
    """Pentadiagonal interior matrix B = D2^T diag(k) D2 / dx^4."""

    grid: Grid
    stiffness: SpaceField
    main: np.ndarray   # B[i, i],   length nx-1
    off1: np.ndarray   # B[i, i+1], length nx-2
    off2: np.ndarray   # B[i, i+2], length nx-3

    def apply_interior(self, f_interior: np.ndarray) -> np.ndarray:
        """B @ f on interior nodes via the factored form, O(nx) work."""
        g = self.grid
        full = np.zeros(g.nx + 1)
        full[1:-1] = f_interior
        moment = self.stiffness.values * nodal_curvature(full, g)
        return nodal_curvature(moment, g)[1:-1]

    def as_dense(self) -> np.ndarray:
        n = self.main.size
        out = np.diag(self.main)
        out += np.diag(self.off1, 1) + np.diag(self.off1, -1)
        out += np.diag(self.off2, 2) + np.diag(self.off2, -2)
        return out

    def shifted_upper_banded(self, scale: float) -> np.ndarray:
        """Upper banded storage of I + scale*B for scipy.linalg.cholesky_banded."""
        n = self.main.size
        ab = np.zeros((3, n))
        ab[2] = 1.0 + scale * self.main
        ab[1, 1:] = scale * self.off1
        ab[0, 2:] = scale * self.off2
        return ab


def assemble_bending(k: SpaceField, grid: Grid) -> BendingOperator:
    """Build the interior bending matrix for nodal stiffness k > 0."""
    grid.check_space(k)
    kv = k.values
    if not np.all(np.isfinite(kv)):
        raise InvalidStiffnessError("stiffness contains non-finite entries")
    if np.any(kv <= 0.0):
        bad = int(np.argmax(kv <= 0.0))
        raise InvalidStiffnessError(
            f"stiffness must be strictly positive at every node; k[{bad}] = {kv[bad]}"
        )
    ki = kv[1:-1]  # boundary stiffness never enters: curvature is zero there
    main = 4.0 * ki.copy()
    main[1:] += ki[:-1]
    main[:-1] += ki[1:]
    off1 = -2.0 * (ki[:-1] + ki[1:])
    off2 = ki[1:-1].copy()
    s = grid.dx**4
    return BendingOperator(grid, k, main / s, off1 / s, off2 / s)


def apply_bending(op: BendingOperator, f: SpaceField) -> SpaceField:
    """Apply B to a field vanishing on the boundary; result vanishes there too."""
    op.grid.check_space(f)
    if abs(f.values[0]) > BOUNDARY_TOL or abs(f.values[-1]) > BOUNDARY_TOL:
        raise FieldShapeError(
            f"bending operator requires zero boundary values, got "
            f"({f.values[0]:.3e}, {f.values[-1]:.3e})"
        )
    out = np.zeros(op.grid.nx + 1)
    out[1:-1] = op.apply_interior(f.values[1:-1])
    return SpaceField(out)
