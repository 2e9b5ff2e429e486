"""Command line entry point: ``mbfgs solve`` and ``mbfgs bench``."""

import argparse
import sys

from .bench import (SuiteConfig, _FORMAT_ALIASES, emit_table, emit_trace, paper_cases,
                    read_cases, run_suite)
from .linesearch import RULES, LineSearchSpec
from .objectives import ALIASES, distance_r, make_problem
from .solver import UPDATES, SolverConfig, minimize

EXIT_OK, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    # usage errors exit with 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser():
    parser = _Parser(prog="mbfgs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="minimize one benchmark function")
    s.add_argument("--function", required=True, choices=sorted(ALIASES))
    s.add_argument("--x0", required=True, type=_floats, help='e.g. "2.0,2.0"')
    s.add_argument("--linesearch", default="armijo", choices=RULES)
    s.add_argument("--update", default="mbfgs", choices=UPDATES)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--max-iter", type=int, default=2000)
    s.add_argument("--c1", type=float, default=None, help="override the rule's c1")
    s.add_argument("--trace", metavar="PATH", help="write a per-iteration CSV trace")

    b = sub.add_parser("bench", help="run a benchmark suite and print tables")
    src = b.add_mutually_exclusive_group(required=True)
    src.add_argument("--suite", choices=["paper"])
    src.add_argument("--cases", metavar="PATH",
                     help="file with one 'function;x0;rule;update' case per line")
    b.add_argument("--reps", type=int, default=10)
    b.add_argument("--tol", type=float, default=1e-6)
    b.add_argument("--c1", type=float, default=None,
                   help="override c1 for every rule (default: per-rule value)")
    b.add_argument("--format", default="md", choices=sorted(_FORMAT_ALIASES))
    b.add_argument("--out", metavar="PATH")
    b.add_argument("--trace-dir", metavar="DIR", help="write one trace CSV per case")
    b.add_argument("--parallel", type=int, default=1, metavar="N")
    return parser


def _solve(args):
    problem = make_problem(args.function)
    if len(args.x0) != problem.dim:
        print(f"error: {problem.id} needs {problem.dim} coordinates, got {len(args.x0)}",
              file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = SolverConfig(update=args.update, grad_tol=args.tol, max_iters=args.max_iter,
                           linesearch=LineSearchSpec(rule=args.linesearch, c1=args.c1),
                           record_trace=args.trace is not None)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        result = minimize(problem, args.x0, cfg)
    except (ArithmeticError, ValueError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    print(f"function     {problem.name}")
    print(f"x0           {args.x0}  (r = {distance_r(args.x0, problem.x_star):.3f})")
    print(f"x*           {tuple(float(v) for v in result.x_final)}")
    print(f"f*           {result.f_final:.6e}")
    print(f"|g|          {result.grad_norm_final:.3e}")
    print(f"iterations   {result.iterations}")
    print(f"evaluations  f={result.total_f_evals} g={result.total_g_evals}")
    print(f"time         {result.wall_time_seconds:.7f} s")
    print(f"termination  {result.termination}" + (f" ({result.message})" if result.message else ""))
    if args.trace:
        try:
            emit_trace(result, args.trace)
        except OSError as exc:
            print(f"error: cannot write trace: {exc}", file=sys.stderr)
            return EXIT_SOLVER
    return EXIT_OK if result.converged else EXIT_SOLVER


def _bench(args):
    try:
        if args.suite:
            cases = paper_cases(repetitions=args.reps, grad_tol=args.tol, c1=args.c1)
        else:
            cases = read_cases(args.cases, repetitions=args.reps, grad_tol=args.tol, c1=args.c1)
        cfg = SuiteConfig(cases, args.format, args.trace_dir, args.reps, args.parallel)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = emit_table(run_suite(cfg), cfg.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "solve":
        return _solve(args)
    return _bench(args)


if __name__ == "__main__":
    sys.exit(main())
