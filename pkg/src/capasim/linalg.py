"""Dense complex matrix kernels.

Matrices and vectors are plain ``numpy`` arrays of dtype ``complex128``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import InvalidDimensionError, InvalidInputError, NumericFailureError


def _checked(a: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix contains non-finite entries")
    return a


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex array with both dims >= 1."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise InvalidDimensionError(f"expected a non-empty 2-D array, got shape {m.shape}")
    return _checked(m)


def dft_matrix(n: int) -> np.ndarray:
    """Unitary DFT matrix with entries ``exp(-2j*pi*k*l/n) / sqrt(n)``."""
    if n < 1:
        raise InvalidDimensionError(f"DFT size must be >= 1, got {n}")
    k = np.arange(n)
    # reduce k*l modulo n before scaling so large n keeps full phase accuracy
    phase = np.outer(k, k) % n
    return np.exp(-2j * np.pi * phase / n) / np.sqrt(n)


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def cyclic_shift_matrix(n: int, shift: int) -> np.ndarray:
    """Permutation delaying a length-``n`` vector by ``shift`` samples (cyclically).

    Row ``k`` holds its single one at column ``(k - shift) mod n``.
    """
    if n < 1:
        raise InvalidDimensionError(f"shift matrix size must be >= 1, got {n}")
    rows = np.arange(n)
    out = np.zeros((n, n), dtype=complex)
    out[rows, (rows - shift) % n] = 1.0
    return out


def hermitian_solve(a, b) -> np.ndarray:
    """Solve ``a x = b`` for Hermitian positive definite ``a`` via Cholesky."""
    a = as_matrix(a)
    b = np.asarray(b, dtype=complex)
    if a.shape[0] != a.shape[1] or b.shape[0] != a.shape[0]:
        raise InvalidDimensionError(f"incompatible shapes {a.shape} and {b.shape}")
    scale = max(np.abs(a).max(), 1.0)
    if np.abs(a - a.conj().T).max() > 1e-10 * scale:
        raise NumericFailureError("matrix is not Hermitian")
    try:
        factor = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NumericFailureError("matrix is not positive definite") from exc
    return scipy.linalg.cho_solve(factor, b, check_finite=False)


def naive_solve(a, b) -> np.ndarray:
    """Textbook Gaussian elimination with partial pivoting, in pure Python.

    Kept deliberately unoptimized: it is the cubic-cost reference point the
    complexity benchmarks compare the message-passing detector against.
    """
    a = as_matrix(a)
    n = a.shape[0]
    if a.shape[1] != n:
        raise InvalidDimensionError("naive_solve needs a square matrix")
    rows = [list(map(complex, r)) for r in a]
    rhs = list(map(complex, np.asarray(b, dtype=complex)))
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(rows[r][col]))
        if abs(rows[piv][col]) == 0.0:
            raise NumericFailureError("singular matrix")
        rows[col], rows[piv] = rows[piv], rows[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        pivot_row = rows[col]
        inv = 1.0 / pivot_row[col]
        for r in range(col + 1, n):
            row = rows[r]
            factor = row[col] * inv
            if factor == 0:
                continue
            for c in range(col, n):
                row[c] -= factor * pivot_row[c]
            rhs[r] -= factor * rhs[col]
    x = [0j] * n
    for r in range(n - 1, -1, -1):
        acc = rhs[r]
        row = rows[r]
        for c in range(r + 1, n):
            acc -= row[c] * x[c]
        x[r] = acc / row[r]
    return np.array(x)


def frobenius_distance_to_identity(a) -> float:
    """Return ``||a a^H - I||_F``."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise InvalidDimensionError("matrix must be square")
    return float(np.linalg.norm(a @ a.conj().T - np.eye(a.shape[0])))
