"""
Dense complex linear algebra used throughout the package.

Vectors and matrices are numpy ``complex128`` arrays; the helpers here add
the dimension checks and conventions (``outer`` conjugates its right factor,
``trace`` refuses non-square input) the rest of the code relies on.
"""

from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from core.errors import DimensionError

ComplexVector = NDArray[np.complex128]
ComplexMatrix = NDArray[np.complex128]

ATOL = 1e-12


def as_vector(v: ArrayLike) -> ComplexVector:
    """Coerce to a 1-D complex array."""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError(f"Expected a non-empty vector, got shape {arr.shape}")
    return arr


def as_matrix(m: ArrayLike) -> ComplexMatrix:
    """Coerce to a 2-D complex array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.size == 0:
        raise DimensionError(f"Expected a non-empty matrix, got shape {arr.shape}")
    return arr


def kron(a: ArrayLike, b: ArrayLike) -> ComplexMatrix:
    """
    Kronecker product with the left factor on the slow index.

    (a⊗b)[i·rb + k, j·cb + l] = a[i, j]·b[k, l]
    """
    return np.kron(as_matrix(a), as_matrix(b))


def dagger(m: ArrayLike) -> ComplexMatrix:
    """Conjugate transpose."""
    return as_matrix(m).conj().T


def trace(m: ArrayLike) -> complex:
    """Sum of the diagonal of a square matrix."""
    arr = as_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"Trace needs a square matrix, got shape {arr.shape}")
    return complex(np.trace(arr))


def outer(v: ArrayLike, w: ArrayLike) -> ComplexMatrix:
    """|v⟩⟨w|, i.e. result[i, j] = v_i·conj(w_j)."""
    return np.outer(as_vector(v), as_vector(w).conj())


def matmul(a: ArrayLike, b: ArrayLike) -> ComplexMatrix:
    left, right = as_matrix(a), as_matrix(b)
    if left.shape[1] != right.shape[0]:
        raise DimensionError(f"Cannot multiply {left.shape} by {right.shape}")
    return left @ right


def matvec(m: ArrayLike, v: ArrayLike) -> ComplexVector:
    mat, vec = as_matrix(m), as_vector(v)
    if mat.shape[1] != vec.shape[0]:
        raise DimensionError(f"Cannot apply {mat.shape} matrix to vector of dim {vec.shape[0]}")
    return mat @ vec


def norm(v: ArrayLike) -> float:
    return float(np.linalg.norm(as_vector(v)))


def expectation(v: ArrayLike, m: ArrayLike) -> complex:
    """⟨v|m|v⟩."""
    vec = as_vector(v)
    return complex(np.vdot(vec, matvec(m, vec)))


def is_hermitian(m: ArrayLike, tol: float = ATOL) -> bool:
    arr = as_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        return False
    return bool(np.allclose(arr, arr.conj().T, rtol=0.0, atol=tol))


def basis_vector(dim: int, index: int) -> ComplexVector:
    """Computational basis vector e_index of length dim."""
    if not 0 <= index < dim:
        raise DimensionError(f"Basis index {index} outside 0..{dim - 1}")
    e = np.zeros(dim, dtype=np.complex128)
    e[index] = 1.0
    return e


def close(a: Union[ArrayLike, complex], b: Union[ArrayLike, complex], tol: float = ATOL) -> bool:
    """Entrywise absolute-tolerance comparison."""
    return bool(np.allclose(a, b, rtol=0.0, atol=tol))
