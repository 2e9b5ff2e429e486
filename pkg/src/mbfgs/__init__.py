"""Quasi-Newton minimization with the modified BFGS update and backtracking line searches."""

from .linesearch import LineSearchSpec, check_conditions
from .objectives import Problem, distance_r, eval_f, eval_grad, fd_gradient, make_problem
from .solver import SolverConfig, SolverResult, minimize

__all__ = [
    "LineSearchSpec", "Problem", "SolverConfig", "SolverResult", "check_conditions",
    "distance_r", "eval_f", "eval_grad", "fd_gradient", "make_problem", "minimize",
]
