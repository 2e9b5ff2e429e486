"""Benchmark objective functions with analytic gradients."""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .numerics import DimensionError, norm2, vector


@dataclass(frozen=True)
class Problem:
    """An objective with its gradient and known minimizer.

    ``f`` and ``grad`` take a 1-D float array of length ``dim``.
    """

    id: str
    name: str
    dim: int
    f: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    known_minimizer: tuple
    known_min_value: float = 0.0

    @property
    def x_star(self) -> np.ndarray:
        return np.array(self.known_minimizer, dtype=np.float64)


def _rosenbrock(x):
    return 100.0 * (x[1] - x[0] ** 2) ** 2 + (1.0 - x[0]) ** 2


def _rosenbrock_grad(x):
    t = x[1] - x[0] ** 2
    return np.array([-400.0 * x[0] * t - 2.0 * (1.0 - x[0]), 200.0 * t])


def _powell(x):
    return ((x[0] + 10.0 * x[1]) ** 2 + 5.0 * (x[2] - x[3]) ** 2
            + (x[1] - 2.0 * x[2]) ** 4 + 10.0 * (x[0] - x[3]) ** 4)


def _powell_grad(x):
    a = x[0] + 10.0 * x[1]
    b = x[2] - x[3]
    c = x[1] - 2.0 * x[2]
    e = x[0] - x[3]
    return np.array([
        2.0 * a + 40.0 * e ** 3,
        20.0 * a + 4.0 * c ** 3,
        10.0 * b - 8.0 * c ** 3,
        -10.0 * b - 40.0 * e ** 3,
    ])


def _wood(x):
    return (100.0 * (x[0] ** 2 - x[1]) ** 2 + (x[0] - 1.0) ** 2 + (x[2] - 1.0) ** 2
            + 90.0 * (x[2] ** 2 - x[3]) ** 2
            + 10.1 * ((x[1] - 1.0) ** 2 + (x[3] - 1.0) ** 2)
            + 19.8 * (x[1] - 1.0) * (x[3] - 1.0))


def _wood_grad(x):
    u = x[0] ** 2 - x[1]
    v = x[2] ** 2 - x[3]
    return np.array([
        400.0 * x[0] * u + 2.0 * (x[0] - 1.0),
        -200.0 * u + 20.2 * (x[1] - 1.0) + 19.8 * (x[3] - 1.0),
        2.0 * (x[2] - 1.0) + 360.0 * x[2] * v,
        -180.0 * v + 20.2 * (x[3] - 1.0) + 19.8 * (x[1] - 1.0),
    ])


def _schumer(x):
    return x[0] ** 4 + x[1] ** 4


def _schumer_grad(x):
    return 4.0 * x ** 3


# Not the classical Schwefel function; the three-square variant used by the
# benchmark tables, minimized at (1, 1).
def _schwefel(x):
    return (x[0] - 1.0) ** 2 + (x[1] - 1.0) ** 2 + (x[0] - x[1] ** 2) ** 2


def _schwefel_grad(x):
    w = x[0] - x[1] ** 2
    return np.array([2.0 * (x[0] - 1.0) + 2.0 * w,
                     2.0 * (x[1] - 1.0) - 4.0 * x[1] * w])


PROBLEMS = {
    "rosenbrock": Problem("rosenbrock", "Rosenbrock", 2, _rosenbrock,
                          _rosenbrock_grad, (1.0, 1.0)),
    "powell_quartic": Problem("powell_quartic", "Powell's quartic", 4, _powell,
                              _powell_grad, (0.0, 0.0, 0.0, 0.0)),
    "wood": Problem("wood", "Wood", 4, _wood, _wood_grad, (1.0, 1.0, 1.0, 1.0)),
    "schumer_steiglitz": Problem("schumer_steiglitz", "Schumer-Steiglitz", 2,
                                 _schumer, _schumer_grad, (0.0, 0.0)),
    "schwefel_variant": Problem("schwefel_variant", "Schwefel (variant)", 2,
                                _schwefel, _schwefel_grad, (1.0, 1.0)),
}

# short names used on the command line
ALIASES = {
    "rosenbrock": "rosenbrock",
    "powell": "powell_quartic",
    "wood": "wood",
    "schumer": "schumer_steiglitz",
    "schwefel": "schwefel_variant",
}

CLI_NAMES = {v: k for k, v in ALIASES.items()}


def make_problem(problem_id: str) -> Problem:
    key = ALIASES.get(problem_id, problem_id)
    try:
        return PROBLEMS[key]
    except KeyError:
        raise ValueError(f"unknown problem {problem_id!r}; "
                         f"choose from {sorted(ALIASES)}") from None


def _point(p: Problem, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (p.dim,):
        raise DimensionError(f"{p.id} expects a point of dimension {p.dim}, got shape {x.shape}")
    return x


def eval_f(p: Problem, x) -> float:
    return float(p.f(_point(p, x)))


def eval_grad(p: Problem, x) -> np.ndarray:
    return np.asarray(p.grad(_point(p, x)), dtype=np.float64)


def fd_gradient(p: Problem, x, h: float = 1e-6) -> np.ndarray:
    """Central-difference gradient, used only to check ``eval_grad``."""
    if not h > 0:
        raise ValueError("h must be positive")
    x = _point(p, x)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (p.f(x + e) - p.f(x - e)) / (2.0 * h)
    return g


def distance_r(x0, x_star) -> float:
    """Euclidean distance between a starting point and the minimizer."""
    x0 = vector(x0)
    x_star = vector(x_star)
    if x0.shape != x_star.shape:
        raise DimensionError(f"dimension mismatch: {x0.shape} vs {x_star.shape}")
    return norm2(x0 - x_star)
