import numpy as np
import pytest

from mbfgs.objectives import Problem

ACCEPTANCE_LINES = []


def quadratic_problem(A, b=None, c=0.0):
    """f(x) = 1/2 x^T A x + b^T x + c with its exact gradient."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    b = np.zeros(n) if b is None else np.asarray(b, dtype=float)
    x_star = np.linalg.solve(A, -b)
    return Problem("quadratic", "quadratic", n,
                   lambda x: 0.5 * x @ A @ x + b @ x + c,
                   lambda x: A @ x + b,
                   tuple(x_star), float(0.5 * x_star @ A @ x_star + b @ x_star + c))


def random_spd(rng, n, lo=0.5, hi=5.0):
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    m = q @ np.diag(rng.uniform(lo, hi, n)) @ q.T
    return 0.5 * (m + m.T)


def scalar_problem(f, df):
    """One-dimensional problem from scalar callables."""
    return Problem("scalar", "scalar", 1,
                   lambda x: float(f(x[0])),
                   lambda x: np.array([df(x[0])], dtype=float),
                   (0.0,))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
