"""Figure rendering for the report-emitting subcommands.

Figures are written next to the delimited report they illustrate, with
derived names (<report stem>_<what>.png). Uses the Agg backend so the CLI
never needs a display.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def _sibling(report_path, suffix: str) -> Path:
    p = Path(report_path)
    return p.with_name(p.stem + "_" + suffix + ".png")


def save_optimization_figures(report, grid, report_path) -> list:
    """Cost/gradient-norm decay and the recovered control, next to the CSV."""
    written = []
    iters = np.arange(report.iterates + 1)

    fig, axes = plt.subplots(2, 1, figsize=(6.4, 6.4), sharex=True)
    axes[0].semilogy(iters, np.maximum(report.cost_history, 1e-300), marker="o", ms=3)
    axes[0].set_ylabel("cost")
    axes[0].grid(True, which="both", alpha=0.3)
    axes[1].semilogy(iters, np.maximum(report.grad_norm_history, 1e-300),
                     marker="o", ms=3, color="tab:orange")
    axes[1].set_ylabel("gradient norm")
    axes[1].set_xlabel("iterate")
    axes[1].grid(True, which="both", alpha=0.3)
    axes[0].set_title(f"descent history ({report.termination})")
    fig.tight_layout()
    out = _sibling(report_path, "history")
    fig.savefig(out, dpi=150)
    plt.close(fig)
    written.append(out)

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(grid.x_nodes, report.final_control.values)
    ax.set_xlabel("x")
    ax.set_ylabel("initial velocity")
    ax.set_title(f"recovered control, final cost {report.final_cost:.3e}")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    out = _sibling(report_path, "control")
    fig.savefig(out, dpi=150)
    plt.close(fig)
    written.append(out)
    return written


def save_verification_figures(report, report_path) -> list:
    """Measured-vs-tolerance bars, plus error decay for the order studies."""
    written = []
    records = report.records

    fig, ax = plt.subplots(figsize=(7.2, 0.6 * max(len(records), 4) + 1.2))
    names = [r.name for r in records]
    measured = [max(abs(r.measured), 1e-300) for r in records]
    tolerance = [max(abs(r.tolerance), 1e-300) for r in records]
    pos = np.arange(len(records))
    colors = ["tab:green" if r.passed else "tab:red" for r in records]
    ax.barh(pos, measured, color=colors, label="measured")
    ax.plot(tolerance, pos, "k|", ms=14, label="tolerance")
    ax.set_yticks(pos, names)
    ax.set_xscale("log")
    ax.invert_yaxis()
    ax.set_xlabel("measured value (bar) vs tolerance (tick)")
    ax.legend(loc="lower right")
    fig.tight_layout()
    out = _sibling(report_path, "checks")
    fig.savefig(out, dpi=150)
    plt.close(fig)
    written.append(out)

    order_records = [r for r in records if "errors" in r.details and "orders" in r.details]
    if order_records:
        fig, ax = plt.subplots(figsize=(6.4, 4.8))
        for rec in order_records:
            errs = np.asarray(rec.details["errors"], dtype=float)
            if np.all(errs == 0.0):
                continue
            sizes = [int(part.split("x")[0]) for part in rec.grid.split(",")]
            h = 1.0 / np.asarray(sizes, dtype=float)
            ax.loglog(h, np.maximum(errs, 1e-300), marker="o", label=rec.name)
        if ax.lines:
            h_ref = np.array([ax.get_xlim()[0], ax.get_xlim()[1]])
            y0 = ax.get_ylim()[0]
            ax.loglog(h_ref, y0 * (h_ref / h_ref[0]) ** 2, "k--", alpha=0.5,
                      label="slope 2")
        ax.set_xlabel("grid spacing (1/N)")
        ax.set_ylabel("error")
        ax.legend(fontsize=8)
        ax.grid(True, which="both", alpha=0.3)
        fig.tight_layout()
        out = _sibling(report_path, "orders")
        fig.savefig(out, dpi=150)
        plt.close(fig)
        written.append(out)
    return written
