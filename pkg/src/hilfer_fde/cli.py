"""Command-line front end.

Exit codes: 0 success, 1 input or numerical error, 2 no solution exists for
the given initial data, 3 ``check`` thresholds exceeded.
"""
import argparse
import dataclasses
import logging
import sys

from . import config
from .exceptions import FdeError
from .fracops import GridSpec
from .io import dumps, read_problem, samples_to_csv, write_csv
from .oracle import compare, volterra_solve
from .solver import eval_solution, residual_check, solve
from .specfun import MlSpec, ml_eval

log = logging.getLogger("hilfer_fde")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNSOLVABLE = 2
EXIT_CHECK_FAILED = 3


def _error(message, *args):
    print("error: " + message % args, file=sys.stderr)


def _unsolvable(report):
    values = ", ".join(f"iv.{i}.{k} = {v!r}" for i, k, v in report.offending)
    _error("no solution: initial values %s must vanish", values)
    return EXIT_UNSOLVABLE


def _load(args):
    problem = read_problem(args.problem)
    if getattr(args, "end", None) is not None:
        problem = dataclasses.replace(problem, interval_end=args.end)
    return problem


def _grid(args, problem):
    return GridSpec(problem.interval_end, args.grid or config.default_grid())


def _floats(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from None


def cmd_solve(args):
    problem = _load(args)
    report, sol = solve(problem)
    log.info("case %s, verdict %s", report.case.name, report.verdict)
    out = report.to_dict()
    out["solution"] = None if sol is None else sol.term_list()
    if sol is not None:
        out["unbounded_at_origin"] = sol.unbounded_at_origin
    sys.stdout.write(dumps(out))
    if sol is None:
        return _unsolvable(report)
    if args.out:
        write_csv(eval_solution(sol, _grid(args, problem), args.tol), args.out)
    return EXIT_OK


def cmd_oracle(args):
    problem = _load(args)
    report, _ = solve(problem)
    sys.stdout.write(dumps(report.to_dict()))
    if not report.solvable:
        return _unsolvable(report)
    samples = volterra_solve(problem, _grid(args, problem))
    if args.out:
        write_csv(samples, args.out)
    else:
        sys.stdout.write(samples_to_csv(samples))
    return EXIT_OK


def cmd_check(args):
    problem = _load(args)
    report, sol = solve(problem)
    if sol is None:
        sys.stdout.write(dumps(report.to_dict()))
        return _unsolvable(report)
    grid = _grid(args, problem)
    residual = residual_check(problem, sol, grid, args.margin, args.tol)
    closed = eval_solution(sol, grid, args.tol)
    reference = volterra_solve(problem, grid)
    rel = compare(closed, reference, config.CHECK_ORACLE_SKIP)["max_rel"]
    sys.stdout.write(dumps({"max_residual": residual, "oracle_max_rel": rel}))
    passed = residual <= config.CHECK_MAX_RESIDUAL and rel <= config.CHECK_MAX_ORACLE_REL
    if not passed:
        _error("check failed: residual %.3e (limit %.1e), oracle rel %.3e (limit %.1e)",
               residual, config.CHECK_MAX_RESIDUAL, rel, config.CHECK_MAX_ORACLE_REL)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def cmd_ml(args):
    z = args.z
    if len(z) != len(args.weights):
        raise FdeError(f"{len(args.weights)} weights but {len(z)} arguments")
    result = ml_eval(MlSpec(tuple(args.weights), args.b), z, args.tol)
    sys.stdout.write(dumps({"value": result.value, "terms_used": result.terms_used,
                            "truncation_bound": result.truncation_bound}))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="hilfer-fde",
                                     description="Multi-term linear FDEs with Hilfer derivatives.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def problem_command(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("problem", help="problem file")
        p.add_argument("--grid", type=int, default=None, help="grid panels N (default %d)" % config.DEFAULT_GRID)
        p.add_argument("--end", type=float, default=None, help="override the interval end X")
        p.set_defaults(func=func)
        return p

    p = problem_command("solve", cmd_solve, "existence report and closed-form solution")
    p.add_argument("--tol", type=float, default=config.DEFAULT_TOL)
    p.add_argument("--out", help="CSV file for samples")
    p = problem_command("oracle", cmd_oracle, "Volterra time-stepping reference")
    p.add_argument("--out", help="CSV file for samples (stdout if omitted)")
    p = problem_command("check", cmd_check, "residual and oracle agreement")
    p.add_argument("--margin", type=float, default=None, help="residual margin (default 10 steps)")
    p.add_argument("--tol", type=float, default=config.DEFAULT_TOL)

    p = sub.add_parser("ml", help="multivariate Mittag-Leffler function")
    p.add_argument("--weights", type=_floats, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--z", type=_floats, required=True)
    p.add_argument("--tol", type=float, default=config.DEFAULT_TOL)
    p.set_defaults(func=cmd_ml)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (FdeError, OSError) as exc:
        _error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
