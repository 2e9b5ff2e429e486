"""Backtracking step-length rules: Armijo, Wolfe and Goldstein.

All three try ``a_init * tau**t`` for ``t = 0, 1, ..., max_backtracks``
and accept the first trial step satisfying the rule. None of them ever
expands the step.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .numerics import dot

RULES = ("armijo", "wolfe", "goldstein")

_DEFAULT_C = {
    "armijo": (1e-4, 0.0),
    "wolfe": (1e-4, 0.9),
    "goldstein": (0.25, 0.0),
}


@dataclass(frozen=True)
class LineSearchSpec:
    rule: str = "armijo"
    a_init: float = 1.0
    tau: float = 0.5
    c1: Optional[float] = None
    c2: Optional[float] = None
    max_backtracks: int = 60

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown line search rule {self.rule!r}; choose from {RULES}")
        c1, c2 = _DEFAULT_C[self.rule]
        if self.c1 is None:
            object.__setattr__(self, "c1", c1)
        if self.c2 is None:
            object.__setattr__(self, "c2", c2)
        if not self.a_init > 0:
            raise ValueError("a_init must be positive")
        if not 0 < self.tau < 1:
            raise ValueError("tau must lie in (0, 1)")
        if self.max_backtracks < 1:
            raise ValueError("max_backtracks must be at least 1")
        if self.rule == "armijo" and not 0 < self.c1 < 1:
            raise ValueError("armijo needs 0 < c1 < 1")
        if self.rule == "wolfe" and not 0 < self.c1 < self.c2 < 1:
            raise ValueError("wolfe needs 0 < c1 < c2 < 1")
        if self.rule == "goldstein" and not 0 < self.c1 < 0.5:
            raise ValueError("goldstein needs 0 < c1 < 0.5")

    def trial_step(self, t: int) -> float:
        return self.a_init * self.tau ** t


@dataclass
class StepResult:
    step: float
    backtracks: int
    f_new: float
    g_new: np.ndarray
    f_evals: int
    g_evals: int
    satisfied: tuple = field(default=())


class LineSearchError(RuntimeError):
    """The line search could not produce an acceptable step."""

    def __init__(self, message, last_step=None, f_evals=0, g_evals=0):
        super().__init__(message)
        self.last_step = last_step
        self.f_evals = f_evals
        self.g_evals = g_evals


class NotDescentError(LineSearchError):
    pass


class WolfeInfeasibleError(LineSearchError):
    """Backtracking ran out before the curvature condition held.

    ``armijo_step`` is the largest trial step that met sufficient decrease,
    or None if no trial did.
    """

    def __init__(self, message, armijo_step: Optional[StepResult], **kw):
        super().__init__(message, **kw)
        self.armijo_step = armijo_step


class GoldsteinWindowMissedError(LineSearchError):
    """The halving schedule jumped over the Goldstein window.

    ``bracket`` holds the last trial above the window (None when the very
    first trial was already below it) and the first trial below it.
    """

    def __init__(self, message, bracket, **kw):
        super().__init__(message, **kw)
        self.bracket = bracket


def check_conditions(rule, f_x, g_x, direction, step, f_new, g_new=None, spec=None):
    """Re-evaluate a rule's inequalities from raw numbers.

    Returns ``(sufficient_decrease,)`` for armijo, ``(sufficient_decrease,
    curvature)`` for wolfe and ``(upper, lower)`` for goldstein. All
    comparisons are inclusive.
    """
    spec = spec or LineSearchSpec(rule=rule)
    slope = dot(g_x, direction)
    upper = bool(f_new <= f_x + spec.c1 * step * slope)
    if rule == "armijo":
        return (upper,)
    if rule == "wolfe":
        return (upper, bool(dot(g_new, direction) >= spec.c2 * slope))
    if rule == "goldstein":
        return (upper, bool(f_x + (1.0 - spec.c1) * step * slope <= f_new))
    raise ValueError(f"unknown line search rule {rule!r}")


def _descent_slope(g_x, direction):
    slope = dot(g_x, direction)
    if not slope < 0:
        raise NotDescentError(f"not a descent direction: g.p = {slope!r}")
    return slope


def armijo_backtrack(problem, x, direction, f_x, g_x, spec) -> StepResult:
    slope = _descent_slope(g_x, direction)
    f_evals = 0
    step = None
    for t in range(spec.max_backtracks + 1):
        step = spec.trial_step(t)
        f_new = problem.f(x + step * direction)
        f_evals += 1
        if f_new <= f_x + spec.c1 * step * slope:
            g_new = problem.grad(x + step * direction)
            return StepResult(step, t, float(f_new), g_new, f_evals, 1, (True,))
    raise LineSearchError(
        f"armijo: no acceptable step after {spec.max_backtracks} backtracks",
        last_step=step, f_evals=f_evals)


def wolfe_backtrack(problem, x, direction, f_x, g_x, spec) -> StepResult:
    slope = _descent_slope(g_x, direction)
    f_evals = g_evals = 0
    best = None
    step = None
    for t in range(spec.max_backtracks + 1):
        step = spec.trial_step(t)
        x_new = x + step * direction
        f_new = problem.f(x_new)
        f_evals += 1
        if not f_new <= f_x + spec.c1 * step * slope:
            continue
        g_new = problem.grad(x_new)
        g_evals += 1
        if dot(g_new, direction) >= spec.c2 * slope:
            return StepResult(step, t, float(f_new), g_new, f_evals, g_evals, (True, True))
        if best is None:
            best = StepResult(step, t, float(f_new), g_new, 0, 0, (True, False))
    if best is not None:
        best.f_evals, best.g_evals = f_evals, g_evals
    raise WolfeInfeasibleError(
        f"wolfe: curvature condition not met within {spec.max_backtracks} backtracks",
        best, last_step=step, f_evals=f_evals, g_evals=g_evals)


def goldstein_backtrack(problem, x, direction, f_x, g_x, spec) -> StepResult:
    slope = _descent_slope(g_x, direction)
    f_evals = 0
    previous = None
    step = None
    for t in range(spec.max_backtracks + 1):
        step = spec.trial_step(t)
        f_new = problem.f(x + step * direction)
        f_evals += 1
        if not f_new <= f_x + spec.c1 * step * slope:
            previous = step
            continue
        if f_x + (1.0 - spec.c1) * step * slope <= f_new:
            g_new = problem.grad(x + step * direction)
            return StepResult(step, t, float(f_new), g_new, f_evals, 1, (True, True))
        # below the window; smaller steps only move further below on convex slices
        raise GoldsteinWindowMissedError(
            f"goldstein: window skipped between steps {previous} and {step}",
            (previous, step), last_step=step, f_evals=f_evals)
    raise LineSearchError(
        f"goldstein: no acceptable step after {spec.max_backtracks} backtracks",
        last_step=step, f_evals=f_evals)


def goldstein_bisect(problem, x, direction, f_x, g_x, spec, bracket) -> StepResult:
    """Bisect inside a bracket left by :func:`goldstein_backtrack`.

    ``bracket = (above, below)`` where the step ``above`` violates the upper
    bound and ``below`` violates the lower bound. Used by the solver after a
    window miss; the accepted step satisfies both Goldstein bounds but is no
    longer on the halving grid.
    """
    hi, lo = bracket
    if hi is None:
        raise LineSearchError("goldstein: first trial already below the window",
                              last_step=lo)
    slope = _descent_slope(g_x, direction)
    f_evals = 0
    step = None
    for t in range(1, spec.max_backtracks + 1):
        step = 0.5 * (hi + lo)
        f_new = problem.f(x + step * direction)
        f_evals += 1
        if not f_new <= f_x + spec.c1 * step * slope:
            hi = step
        elif not f_x + (1.0 - spec.c1) * step * slope <= f_new:
            lo = step
        else:
            g_new = problem.grad(x + step * direction)
            return StepResult(step, t, float(f_new), g_new, f_evals, 1, (True, True))
    raise LineSearchError(
        f"goldstein: bisection found no step in the window after {spec.max_backtracks} trials",
        last_step=step, f_evals=f_evals)


SEARCHES = {
    "armijo": armijo_backtrack,
    "wolfe": wolfe_backtrack,
    "goldstein": goldstein_backtrack,
}


def line_search(problem, x, direction, f_x, g_x, spec) -> StepResult:
    return SEARCHES[spec.rule](problem, x, direction, f_x, g_x, spec)

