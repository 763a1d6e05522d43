"""Dense matrix helpers.

Every numeric quantity in the package is a 2-D ``float64`` numpy array with
rows indexing examples. The functions here add the shape and finiteness
checks the rest of the code relies on.
"""
from __future__ import annotations

import numpy as np

from .errors import ShapeError

Matrix = np.ndarray


def as_matrix(data, *, check_finite: bool = True) -> Matrix:
    """Convert ``data`` to a 2-D float64 array.

    1-D input becomes a single row. Non-finite entries are rejected unless
    ``check_finite`` is False.
    """
    m = np.array(data, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got {m.ndim}-D array of shape {m.shape}")
    if check_finite and not np.isfinite(m).all():
        raise ValueError("matrix contains NaN or Inf entries")
    return m


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def transpose(a: Matrix) -> Matrix:
    return np.ascontiguousarray(a.T)


def elementwise(fn, a: Matrix) -> Matrix:
    return np.asarray(fn(a), dtype=np.float64)


def norm2(v: Matrix) -> float:
    """Euclidean norm of a row or column vector."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim == 2 and 1 not in v.shape:
        raise ShapeError(f"norm2 needs a vector, got shape {v.shape}")
    flat = v.reshape(-1)
    if flat.size == 0:
        raise ShapeError("norm2 of an empty vector")
    # scale first so squares neither underflow nor overflow
    s = float(np.max(np.abs(flat)))
    if s == 0.0:
        return 0.0
    u = flat / s
    return s * float(np.sqrt(np.dot(u, u)))


def frob(m: Matrix) -> float:
    """Frobenius norm; identical to ``norm2`` of the flattened matrix."""
    m = np.asarray(m, dtype=np.float64)
    if m.size == 0:
        return 0.0
    return norm2(m.reshape(1, -1))


def column_norms(m: Matrix) -> np.ndarray:
    """2-norm of every column of ``m`` as a 1-D array."""
    return np.sqrt(np.einsum("ij,ij->j", m, m))
