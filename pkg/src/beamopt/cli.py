"""Command-line driver.

Exit codes: 0 success, 1 usage/config/file errors, 2 numerical failures,
3 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import fieldio
from .adjoint import solve_adjoint
from .config import load_config
from .control import estimate_lipschitz, gradient, optimize
from .dynamics import solve_forward
from .errors import BeamOptError, NumericalFailureError
from .verify import SUITE_NAMES, run_suite

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamopt",
        description="Initial-velocity control of a simply supported vibrating beam.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("forward", help="solve the beam equation with the config's v0")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="CSV path for the displacement field")

    p = sub.add_parser("adjoint", help="solve the costate problem for a given state")
    p.add_argument("--config", required=True)
    p.add_argument("--u", required=True, help="CSV with the displacement field")
    p.add_argument("--out", help="CSV path for the costate; its t=0 trace goes "
                                 "to <out stem>_t0<ext>")

    p = sub.add_parser("gradient", help="cost gradient at a given control")
    p.add_argument("--config", required=True)
    p.add_argument("--v", required=True, help="CSV with the control field")
    p.add_argument("--out", help="CSV path for the gradient field")

    p = sub.add_parser("optimize", help="projected gradient descent")
    p.add_argument("--config", required=True)
    p.add_argument("--vout", help="CSV path for the final control")
    p.add_argument("--report", help="CSV path for the iterate history")
    p.add_argument("--no-figures", action="store_true",
                   help="skip PNG figures next to the report CSV")

    p = sub.add_parser("lipschitz", help="estimate the gradient's Lipschitz constant")
    p.add_argument("--config", required=True)

    p = sub.add_parser("verify", help="run identity/convergence checks")
    p.add_argument("--config", required=True)
    p.add_argument("--suite", default="all", choices=SUITE_NAMES)
    p.add_argument("--report", help="CSV path for the check records")
    p.add_argument("--no-figures", action="store_true",
                   help="skip PNG figures next to the report CSV")
    return parser


def _cmd_forward(args) -> int:
    cfg = load_config(args.config)
    problem = cfg.problem()
    state = solve_forward(problem, cfg.initial_control())
    out = args.out or cfg.out
    if out is None:
        raise BeamOptError("no output path: pass --out or set 'out' in the config")
    fieldio.write_spacetime_field(out, state.displacement, problem.grid)
    print(f"wrote displacement to {out}")
    return EXIT_OK


def _cmd_adjoint(args) -> int:
    cfg = load_config(args.config)
    problem = cfg.problem()
    u = fieldio.read_spacetime_field(args.u, problem.grid)
    adj = solve_adjoint(problem, u)
    out = args.out or cfg.out
    if out is None:
        raise BeamOptError("no output path: pass --out or set 'out' in the config")
    fieldio.write_spacetime_field(out, adj.costate, problem.grid)
    trace_path = Path(out).with_name(Path(out).stem + "_t0" + Path(out).suffix)
    fieldio.write_space_field(trace_path, adj.trace_at_zero, problem.grid)
    print(f"wrote costate to {out} and its t=0 trace to {trace_path}")
    return EXIT_OK


def _cmd_gradient(args) -> int:
    cfg = load_config(args.config)
    problem = cfg.problem()
    v = fieldio.read_space_field(args.v, problem.grid)
    grad = gradient(problem, v)
    out = args.out or cfg.out
    if out is None:
        raise BeamOptError("no output path: pass --out or set 'out' in the config")
    fieldio.write_space_field(out, grad, problem.grid)
    print(f"wrote gradient to {out}")
    return EXIT_OK


def _cmd_optimize(args) -> int:
    cfg = load_config(args.config)
    problem = cfg.problem()
    report = optimize(problem, cfg.optimizer, cfg.initial_control())
    print(f"terminated: {report.termination} after {report.iterates} iterates, "
          f"final cost {report.final_cost:.6e}")
    if report.lipschitz_used is not None:
        print(f"lipschitz estimate used for the step size: {report.lipschitz_used:.8e}")
    vout = args.vout or cfg.vout
    if vout:
        fieldio.write_space_field(vout, report.final_control, problem.grid)
        print(f"wrote final control to {vout}")
    report_path = args.report or cfg.report
    if report_path:
        fieldio.write_optimization_report(report_path, report)
        print(f"wrote iterate history to {report_path}")
        if not args.no_figures:
            from .figures import save_optimization_figures
            for fig in save_optimization_figures(report, problem.grid, report_path):
                print(f"wrote figure {fig}")
    return EXIT_OK


def _cmd_lipschitz(args) -> int:
    cfg = load_config(args.config)
    problem = cfg.problem()
    est = estimate_lipschitz(problem, cfg.optimizer)
    print(f"lipschitz_estimate = {est.value:.12e}")
    print(f"power_iteration_residual = {est.residual:.3e}")
    print(f"iterations = {est.iterations}, converged = {est.converged}, seed = {est.seed}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    cfg = load_config(args.config)
    problem = cfg.problem()
    report = run_suite(problem, cfg.optimizer, cfg.initial_control(),
                       suite=args.suite, seed=cfg.optimizer.seed)
    for line in report.lines():
        print(line)
    report_path = args.report or cfg.report
    if report_path:
        fieldio.write_verification_report(report_path, report)
        print(f"wrote check records to {report_path}")
        if not args.no_figures:
            from .figures import save_verification_figures
            for fig in save_verification_figures(report, report_path):
                print(f"wrote figure {fig}")
    if not report.passed:
        failed = sum(1 for r in report.records if not r.passed)
        print(f"verification FAILED: {failed} of {len(report.records)} checks")
        return EXIT_VERIFY
    print(f"verification passed: {len(report.records)} checks")
    return EXIT_OK


_HANDLERS = {
    "forward": _cmd_forward,
    "adjoint": _cmd_adjoint,
    "gradient": _cmd_gradient,
    "optimize": _cmd_optimize,
    "lipschitz": _cmd_lipschitz,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return _HANDLERS[args.command](args)
    except NumericalFailureError as exc:
        print(f"beamopt: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except BeamOptError as exc:
        print(f"beamopt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run():
    raise SystemExit(main())


if __name__ == "__main__":
    run()
