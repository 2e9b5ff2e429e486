"""Quasi-Newton minimization with the BFGS and modified BFGS updates."""

import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .linesearch import (GoldsteinWindowMissedError, LineSearchError, LineSearchSpec,
                         StepResult, WolfeInfeasibleError, check_conditions, goldstein_bisect,
                         line_search)
from .numerics import DimensionError, dot, identity, mat_vec, norm2, vector

UPDATES = ("bfgs", "mbfgs")


class CurvatureSkip(ArithmeticError):
    """d.y is too small for a positive definite update; keep M unchanged."""


class NonFiniteError(FloatingPointError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    update: str = "mbfgs"
    grad_tol: float = 1e-6
    max_iters: int = 2000
    curvature_skip_tol: float = 1e-12
    c_rtol: float = 1e-12
    linesearch: LineSearchSpec = field(default_factory=LineSearchSpec)
    record_trace: bool = True
    debug: bool = False  # re-check every accepted step with check_conditions

    def __post_init__(self):
        if self.update not in UPDATES:
            raise ValueError(f"unknown update {self.update!r}; choose from {UPDATES}")
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.curvature_skip_tol < 0:
            raise ValueError("curvature_skip_tol must be nonnegative")
        if self.c_rtol < 0:
            raise ValueError("c_rtol must be nonnegative")


@dataclass
class IterationRecord:
    """State after ``k`` accepted steps.

    Row 0 describes the starting point; its step fields are zero and
    ``update_applied`` is ``"none"``.
    """

    k: int
    x: np.ndarray
    f: float
    grad_norm: float
    step: float = 0.0
    backtracks: int = 0
    C: float = 0.0
    update_applied: str = "none"
    f_evals: int = 0
    g_evals: int = 0
    fallback: str = ""


@dataclass
class SolverResult:
    x_final: np.ndarray
    f_final: float
    grad_norm_final: float
    iterations: int
    termination: str
    wall_time_seconds: float
    trace: List[IterationRecord] = field(default_factory=list)
    total_f_evals: int = 0
    total_g_evals: int = 0
    message: str = ""

    @property
    def converged(self) -> bool:
        return self.termination == "converged"


def compute_C(f_j, f_next, g_j, g_next, d_j) -> float:
    """2 (f_j - f_next) + (g_next + g_j).d_j

    Zero for any quadratic; positive where f curves less than its
    trapezoidal model along the step.
    """
    g_j = np.asarray(g_j, dtype=np.float64)
    g_next = np.asarray(g_next, dtype=np.float64)
    if g_j.shape != g_next.shape:
        raise DimensionError(f"dimension mismatch: {g_j.shape} vs {g_next.shape}")
    return 2.0 * (f_j - f_next) + dot(g_next + g_j, d_j)


def c_noise_floor(f_j, f_next, g_j, g_next, d_j, rtol) -> float:
    """Magnitude below which a computed C is indistinguishable from rounding.

    C is a cancelling sum of O(|f|) and O(|g||d|) terms, so its absolute
    error scales with those terms, not with C itself.
    """
    return rtol * (abs(f_j) + abs(f_next) + abs(dot(g_j, d_j)) + abs(dot(g_next, d_j)))


def modified_y(h, d, C) -> np.ndarray:
    """Gradient difference ``h`` boosted along ``d`` by ``max(C, 0) / |d|^2``."""
    h = np.asarray(h, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    dd = dot(d, d)
    if dd == 0.0:
        raise ValueError("degenerate step: d is the zero vector")
    if C <= 0:
        return h.copy()
    return h + (C / dd) * d


def inverse_update(M, d, y, curvature_skip_tol=0.0) -> np.ndarray:
    """BFGS update of the inverse Hessian approximation.

    Computes ``(I - rho d y^T) M (I - rho y d^T) + rho d d^T`` with
    ``rho = 1 / d.y``. Raises CurvatureSkip when ``d.y`` does not exceed
    ``curvature_skip_tol * |d| |y|``.
    """
    M = np.asarray(M, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    dy = dot(d, y)
    if not dy > curvature_skip_tol * norm2(d) * norm2(y) or dy <= 0:
        raise CurvatureSkip(f"d.y = {dy!r} too small for a positive definite update")
    rho = 1.0 / dy
    My = mat_vec(M, y)
    yMy = dot(y, My)
    # expanded form of the product above
    new = (M - rho * (np.outer(d, My) + np.outer(My, d))
           + (rho * rho * yMy + rho) * np.outer(d, d))
    return 0.5 * (new + new.T)


def direct_update(B, d, y) -> np.ndarray:
    """Direct-form BFGS update ``B - B d d^T B / d^T B d + y y^T / d^T y``.

    Kept as an independent check on :func:`inverse_update`.
    """
    B = np.asarray(B, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    Bd = mat_vec(B, d)
    dBd = dot(d, Bd)
    dy = dot(d, y)
    if not dBd > 0 or not dy > 0:
        raise ValueError(f"nonpositive denominator: d.Bd = {dBd!r}, d.y = {dy!r}")
    new = B - np.outer(Bd, Bd) / dBd + np.outer(y, y) / dy
    return 0.5 * (new + new.T)


def _check_finite(k, x, f, g):
    if not (np.isfinite(f) and np.all(np.isfinite(g))):
        raise NonFiniteError(f"non-finite objective or gradient at iterate {k}: x = {x!r}")


def minimize(problem, x0, cfg: Optional[SolverConfig] = None,
             monitor: Optional[Callable] = None) -> SolverResult:
    """Minimize ``problem`` from ``x0`` with a quasi-Newton method.

    The inverse Hessian approximation starts at the identity. With
    ``cfg.update == "mbfgs"`` the secant vector is replaced by
    :func:`modified_y` whenever the C value of the step is positive, i.e.
    above :func:`c_noise_floor`.

    ``monitor``, if given, is called after every accepted step with keyword
    arguments ``record``, ``f_old``, ``g_old``, ``direction``, ``d``, ``h``,
    ``y``, ``M_old``, ``M`` and ``step_result``. It exists for testing and
    diagnostics; its return value is ignored.
    """
    cfg = cfg or SolverConfig()
    ls = cfg.linesearch
    x = vector(x0)
    if x.shape != (problem.dim,):
        raise DimensionError(f"{problem.id} expects dimension {problem.dim}, got {x.size}")

    start = time.perf_counter()
    f = float(problem.f(x))
    g = np.asarray(problem.grad(x), dtype=np.float64)
    _check_finite(0, x, f, g)
    f_evals = g_evals = 1
    gnorm = norm2(g)
    M = identity(problem.dim)
    trace = []
    if cfg.record_trace:
        trace.append(IterationRecord(0, x.copy(), f, gnorm, f_evals=1, g_evals=1))

    k = 0
    termination = "max_iters"
    message = ""
    while True:
        if gnorm <= cfg.grad_tol:
            termination = "converged"
            break
        if k >= cfg.max_iters:
            break
        direction = -mat_vec(M, g)
        fallback = ""
        try:
            try:
                sr = line_search(problem, x, direction, f, g, ls)
            except WolfeInfeasibleError as exc:
                if exc.armijo_step is None:
                    raise
                sr = exc.armijo_step
                fallback = "wolfe_armijo_only"
            except GoldsteinWindowMissedError as exc:
                above, below = exc.bracket
                if above is not None:
                    sr = goldstein_bisect(problem, x, direction, f, g, ls, exc.bracket)
                    fallback = "goldstein_bisection"
                else:
                    # a_init is already short of the window; without expansion
                    # the best available step is a_init itself
                    x_try = x + below * direction
                    sr = StepResult(below, 0, float(problem.f(x_try)),
                                    np.asarray(problem.grad(x_try), dtype=np.float64),
                                    1, 1, (True, False))
                    fallback = "goldstein_lower_waived"
                sr.f_evals += exc.f_evals
        except LineSearchError as exc:
            f_evals += exc.f_evals
            g_evals += exc.g_evals
            termination, message = "linesearch_failure", str(exc)
            break
        f_evals += sr.f_evals
        g_evals += sr.g_evals

        if cfg.debug and not fallback:
            flags = check_conditions(ls.rule, f, g, direction, sr.step, sr.f_new, sr.g_new, ls)
            if not all(flags):
                raise RuntimeError(f"step {k + 1} violates the {ls.rule} conditions: {flags}")

        x_new = x + sr.step * direction
        f_new = sr.f_new
        g_new = np.asarray(sr.g_new, dtype=np.float64)
        _check_finite(k + 1, x_new, f_new, g_new)

        d = x_new - x
        h = g_new - g
        C = 0.0
        branch = "bfgs_branch"
        y = h
        if cfg.update == "mbfgs":
            C = compute_C(f, f_new, g, g_new, d)
            if C > c_noise_floor(f, f_new, g, g_new, d, cfg.c_rtol):
                y = modified_y(h, d, C)
                branch = "mbfgs_branch"
        M_old = M
        try:
            M = inverse_update(M, d, y, cfg.curvature_skip_tol)
        except CurvatureSkip:
            branch = "skipped"

        k += 1
        f_old, g_old = f, g
        x, f, g = x_new, f_new, g_new
        gnorm = norm2(g)
        record = IterationRecord(k, x.copy(), f, gnorm, sr.step, sr.backtracks, C,
                                 branch, sr.f_evals, sr.g_evals, fallback)
        if cfg.record_trace:
            trace.append(record)
        if monitor is not None:
            monitor(record=record, f_old=f_old, g_old=g_old, direction=direction,
                    d=d, h=h, y=y, M_old=M_old, M=M, step_result=sr)

    return SolverResult(x, f, gnorm, k, termination, time.perf_counter() - start,
                        trace, f_evals, g_evals, message)
