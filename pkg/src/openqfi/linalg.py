"""Dense complex linear algebra used throughout the package.

All functions take and return plain ``numpy`` arrays. Nothing here keeps
state, so every function is safe to call from several threads at once.
"""

from functools import reduce

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, NotHermitianError, NumericalOverflowError

HERMITIAN_TOL = 1e-10


def as_matrix(m):
    """Return ``m`` as a 2-D complex array, rejecting NaN/Inf entries."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def dag(m):
    return np.conj(np.swapaxes(m, -1, -2))


def is_hermitian(h, tol=HERMITIAN_TOL):
    h = np.asarray(h)
    return h.shape[0] == h.shape[1] and np.max(np.abs(h - dag(h)), initial=0.0) <= tol


def kron(*ops):
    """Kronecker product of one or more matrices, left to right."""
    if not ops:
        raise ValueError("kron needs at least one operand")
    return reduce(np.kron, (np.asarray(op, dtype=complex) for op in ops))


def eigh(h, tol=HERMITIAN_TOL):
    """Hermitian eigendecomposition with ascending eigenvalues.

    Raises ``NotHermitianError`` when ``max|h - h^dagger| > tol``. The input
    is symmetrized before factorization so that the result does not depend
    on round-off in the lower triangle.
    """
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise DimensionMismatchError(f"eigh needs a square matrix, got {h.shape}")
    dev = np.max(np.abs(h - dag(h)), initial=0.0)
    if dev > tol:
        raise NotHermitianError(f"matrix deviates from Hermitian by {dev:.3g}")
    return np.linalg.eigh(0.5 * (h + dag(h)))


def expm(m):
    """Matrix exponential (scaling and squaring with a Pade core)."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expm needs a square matrix, got {m.shape}")
    with np.errstate(over="ignore", invalid="ignore"):
        out = scipy.linalg.expm(m)
    if not np.all(np.isfinite(out)):
        raise NumericalOverflowError(
            f"exponential overflowed (1-norm of argument {np.linalg.norm(m, 1):.3g})"
        )
    return out


def expm_frechet(m, e):
    """Directional derivative of ``expm`` at ``m`` along ``e``.

    Uses the block identity
    ``expm([[m, e], [0, m]]) = [[expm(m), D], [0, expm(m)]]``
    and returns the top-right block ``D``.
    """
    m = as_matrix(m)
    e = as_matrix(e)
    if m.shape != e.shape or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"shapes {m.shape} and {e.shape} are incompatible")
    d = m.shape[0]
    block = np.zeros((2 * d, 2 * d), dtype=complex)
    block[:d, :d] = m
    block[d:, d:] = m
    block[:d, d:] = e
    return expm(block)[:d, d:]
