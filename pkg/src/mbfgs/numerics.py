"""Small dense linear-algebra kernel.

Vectors are 1-D float64 numpy arrays and symmetric matrices are square
float64 numpy arrays; the helpers here validate those shapes and provide
the handful of products the solver and line searches need.
"""

import numpy as np


class DimensionError(ValueError):
    """Operands have incompatible dimensions."""


def vector(values) -> np.ndarray:
    """Build a finite, non-empty 1-D float64 vector (copied)."""
    v = np.array(values, dtype=np.float64)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1 or v.size < 1:
        raise DimensionError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"vector has non-finite entries: {v}")
    return v


def sym_matrix(values, atol: float = 0.0) -> np.ndarray:
    """Build a finite symmetric float64 matrix.

    Entries are mirrored from the upper triangle, so the result is exactly
    symmetric. ``atol`` bounds the asymmetry tolerated in the input.
    """
    m = np.array(values, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if np.max(np.abs(m - m.T)) > atol:
        raise ValueError("matrix is not symmetric")
    upper = np.triu(m)
    return upper + np.triu(m, 1).T


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.float64)


def _check_same_dim(a, b):
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")


def dot(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_same_dim(a, b)
    return float(np.dot(a, b))


def norm2(a) -> float:
    """Euclidean norm."""
    a = np.asarray(a, dtype=np.float64)
    return float(np.sqrt(np.dot(a, a)))


def mat_vec(m, v) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if m.ndim != 2 or v.ndim != 1 or m.shape[1] != v.shape[0]:
        raise DimensionError(f"cannot multiply {m.shape} matrix by {v.shape} vector")
    return m @ v


def is_spd(m, tol: float = 1e-12) -> bool:
    """Return True if ``m`` is symmetric positive definite.

    Runs an unpivoted Cholesky elimination and requires every pivot to
    exceed ``tol * max(1, max diagonal entry)``.
    """
    a = np.array(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    if not np.all(np.isfinite(a)) or not np.array_equal(a, a.T):
        return False
    n = a.shape[0]
    threshold = tol * max(1.0, float(np.max(np.diag(a))))
    for j in range(n):
        pivot = a[j, j] - np.dot(a[j, :j], a[j, :j])
        if not pivot > threshold:
            return False
        a[j, j] = np.sqrt(pivot)
        for i in range(j + 1, n):
            a[i, j] = (a[i, j] - np.dot(a[i, :j], a[j, :j])) / a[j, j]
    return True
