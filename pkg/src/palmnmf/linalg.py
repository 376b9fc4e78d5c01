"""Dense-matrix kernels for the factorization solver.

Matrices are 2-D float64 numpy arrays throughout the package;
``as_matrix`` is the boundary validator that enforces this.
"""

import numpy as np

from .errors import ShapeError


def as_matrix(a, name="matrix"):
    """Validate *a* as a dense real matrix: 2-D, non-empty, finite float64."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got {m.ndim}-D")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"{name} must be non-empty, got shape {m.shape[0]}x{m.shape[1]}")
    if not np.isfinite(m).all():
        raise ValueError(f"{name} contains non-finite entries")
    return m


def matmul(a, b):
    """Matrix product a @ b."""
    a = as_matrix(a, "left operand")
    b = as_matrix(b, "right operand")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(
            f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}"
        )
    return a @ b


def frobenius_norm(m):
    """Square root of the sum of squared entries."""
    m = as_matrix(m)
    return float(np.sqrt(np.sum(m * m)))


def difference_operator(n):
    """The n x (n-1) matrix D with D[j,j]=1, D[j+1,j]=-1, zero elsewhere.

    Right-multiplying takes adjacent-column differences:
    (M @ D)[:, j] == M[:, j] - M[:, j+1].
    """
    if n < 2:
        raise ValueError(f"difference operator needs n >= 2, got {n}")
    d = np.zeros((n, n - 1))
    idx = np.arange(n - 1)
    d[idx, idx] = 1.0
    d[idx + 1, idx] = -1.0
    return d


def nonneg_project(m):
    """Elementwise max(0, x): projection onto the nonnegative orthant."""
    return np.maximum(as_matrix(m), 0.0)


def soft_threshold_nonneg(m, tau):
    """Elementwise max(0, x - tau).

    This is the proximal map of tau*|x| restricted to x >= 0; with tau=0
    it reduces to ``nonneg_project``.
    """
    if not tau >= 0:
        raise ValueError(f"threshold must be >= 0, got {tau}")
    return np.maximum(as_matrix(m) - tau, 0.0)
