"""CSV serialization of fields and reports.

Space fields: header ``x,value`` then nx+1 rows of ``x_i,f(x_i)``.
Space-time fields: header ``t,<x_0>,...,<x_nx>`` carrying the numeric x
coordinates, then nt+1 rows of ``t_n,u(x_0,t_n),...``. All numbers use '.'
decimals and 17 significant digits, so a write/read round trip reproduces
float64 values exactly. Files whose coordinates disagree with the configured
grid by more than 1e-9 are rejected.
"""

from __future__ import annotations

import numpy as np

from .errors import FieldIOError, GridMismatchError
from .grid import Grid, SpaceField, SpaceTimeField

COORD_TOL = 1e-9


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _read_rows(path):
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise FieldIOError(f"cannot read {path!r}: {exc}") from exc
    return [line.split(",") for line in lines if line.strip()]


def _cell(path, cells, row, col):
    try:
        return float(cells[col])
    except ValueError:
        raise FieldIOError(
            f"{path}: non-numeric cell {cells[col]!r} at row {row}, column {col + 1}")


def write_space_field(path, f: SpaceField, grid: Grid):
    grid.check_space(f)
    lines = ["x,value"]
    for x, val in zip(grid.x_nodes, f.values):
        lines.append(f"{_fmt(x)},{_fmt(val)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_space_field(path, grid: Grid) -> SpaceField:
    rows = _read_rows(path)
    if not rows or [c.strip() for c in rows[0]] != ["x", "value"]:
        raise FieldIOError(f"{path}: expected header 'x,value'")
    data = rows[1:]
    if len(data) != grid.nx + 1:
        raise FieldIOError(
            f"{path}: expected {grid.nx + 1} data rows for this grid, got {len(data)}")
    values = np.empty(grid.nx + 1)
    for i, cells in enumerate(data):
        if len(cells) != 2:
            raise FieldIOError(f"{path}: expected 2 cells at row {i + 2}, got {len(cells)}")
        x = _cell(path, cells, i + 2, 0)
        if abs(x - grid.x_nodes[i]) > COORD_TOL:
            raise GridMismatchError(
                f"{path}: x coordinate {x!r} at row {i + 2} disagrees with grid "
                f"node {grid.x_nodes[i]!r}")
        values[i] = _cell(path, cells, i + 2, 1)
    return SpaceField(values)


def write_spacetime_field(path, f: SpaceTimeField, grid: Grid):
    grid.check_spacetime(f)
    lines = ["t," + ",".join(_fmt(x) for x in grid.x_nodes)]
    for t, row in zip(grid.t_nodes, f.values):
        lines.append(_fmt(t) + "," + ",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_spacetime_field(path, grid: Grid) -> SpaceTimeField:
    rows = _read_rows(path)
    if not rows or rows[0][0].strip() != "t":
        raise FieldIOError(f"{path}: expected header starting with 't'")
    header = rows[0]
    if len(header) != grid.nx + 2:
        raise FieldIOError(
            f"{path}: expected {grid.nx + 2} header cells for this grid, got {len(header)}")
    for i in range(grid.nx + 1):
        x = _cell(path, header, 1, i + 1)
        if abs(x - grid.x_nodes[i]) > COORD_TOL:
            raise GridMismatchError(
                f"{path}: header x coordinate {x!r} disagrees with grid node "
                f"{grid.x_nodes[i]!r}")
    data = rows[1:]
    if len(data) != grid.nt + 1:
        raise FieldIOError(
            f"{path}: expected {grid.nt + 1} data rows for this grid, got {len(data)}")
    values = np.empty((grid.nt + 1, grid.nx + 1))
    for n, cells in enumerate(data):
        if len(cells) != grid.nx + 2:
            raise FieldIOError(
                f"{path}: expected {grid.nx + 2} cells at row {n + 2}, got {len(cells)}")
        t = _cell(path, cells, n + 2, 0)
        if abs(t - grid.t_nodes[n]) > COORD_TOL:
            raise GridMismatchError(
                f"{path}: t coordinate {t!r} at row {n + 2} disagrees with grid "
                f"node {grid.t_nodes[n]!r}")
        for i in range(grid.nx + 1):
            values[n, i] = _cell(path, cells, n + 2, i + 1)
    return SpaceTimeField(values)


def write_optimization_report(path, report):
    """Iterate history as CSV with columns iter,cost,grad_norm,step."""
    lines = ["iter,cost,grad_norm,step"]
    for k in range(report.iterates + 1):
        lines.append(",".join([str(k), _fmt(report.cost_history[k]),
                               _fmt(report.grad_norm_history[k]),
                               _fmt(report.step_history[k])]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_verification_report(path, report):
    """Per-check records as CSV with columns name,measured,tolerance,passed,grid."""
    lines = ["name,measured,tolerance,passed,grid"]
    for rec in report.records:
        lines.append(",".join([rec.name, _fmt(rec.measured), _fmt(rec.tolerance),
                               "1" if rec.passed else "0", rec.grid]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
