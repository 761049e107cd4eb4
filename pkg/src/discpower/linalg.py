"""Small dense complex linear algebra for one- and two-qubit operators.

Matrices are plain ``numpy`` complex arrays of shape (2, 2) or (4, 4). Most
helpers also accept a leading batch axis, which the discord and power code
rely on. Basis ordering is |00>, |01>, |10>, |11> with qubit A as the left
tensor factor.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-9
UNITARY_TOL = 1e-10
CLIP_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = np.stack([I2, SX, SY, SZ])

# SWAP in the |00>,|01>,|10>,|11> basis
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


class EigenSystem(NamedTuple):
    """Eigenvalues in descending order and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _check_square(m: np.ndarray, dims=(2, 4)) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2] or m.shape[-1] not in dims:
        raise ValueError(f"expected a square matrix of dimension {dims}, got shape {m.shape}")
    return m


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two single-qubit operators (qubit A on the left)."""
    a = _check_square(a, (2,))
    b = _check_square(b, (2,))
    out = np.einsum("...ij,...kl->...ikjl", a, b)
    return out.reshape(out.shape[:-4] + (4, 4))


def adjoint(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(np.asarray(m), -1, -2))


def trace(m: np.ndarray):
    return np.trace(np.asarray(m), axis1=-2, axis2=-1)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[-1] != b.shape[-2]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[-2:] != b.shape[-2:]:
        raise ValueError(f"dimension mismatch: {a.shape} + {b.shape}")
    return a + b


def scale(m: np.ndarray, c: complex) -> np.ndarray:
    return c * np.asarray(m)


def frobenius_distance(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def conjugate(u: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Return U rho U^dagger (broadcasts over leading axes)."""
    return u @ rho @ adjoint(u)


def partial_trace(m: np.ndarray, subsystem: str) -> np.ndarray:
    """Trace out qubit ``"A"`` or ``"B"`` of a 4x4 operator (batch axes allowed)."""
    m = _check_square(m, (4,))
    r = m.reshape(m.shape[:-2] + (2, 2, 2, 2))
    if subsystem == "A":
        return np.einsum("...ijik->...jk", r)
    if subsystem == "B":
        return np.einsum("...ijkj->...ik", r)
    raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")


def hermiticity_error(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - adjoint(m)))) if m.size else 0.0


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return hermiticity_error(m) <= tol


def unitarity_error(u: np.ndarray) -> float:
    u = np.asarray(u)
    eye = np.eye(u.shape[-1])
    return float(np.max(np.abs(adjoint(u) @ u - eye)))


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return unitarity_error(u) <= tol


def hermitian_eigen(m: np.ndarray, tol: float = HERMITIAN_TOL) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.

    Raises ValueError when ``m`` deviates from Hermitian by more than ``tol``
    (max-abs entry of ``m - m^dagger``).
    """
    m = _check_square(m)
    if hermiticity_error(m) > tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    h = 0.5 * (m + adjoint(m))
    vals, vecs = np.linalg.eigh(h)
    return EigenSystem(vals[..., ::-1].copy(), vecs[..., ::-1].copy())


def hermitian_eigvals(m: np.ndarray) -> np.ndarray:
    """Descending eigenvalues of (the Hermitian part of) a batch of matrices."""
    m = np.asarray(m)
    vals = np.linalg.eigvalsh(0.5 * (m + adjoint(m)))
    return vals[..., ::-1]


def clip_spectrum(vals: np.ndarray, tol: float = CLIP_TOL) -> np.ndarray:
    """Zero out small negative eigenvalues and renormalize to unit sum.

    Values below ``-tol`` indicate a non-physical input and raise ValueError.
    """
    vals = np.asarray(vals, dtype=float)
    if np.any(vals < -tol):
        raise ValueError(f"eigenvalue below -{tol:g}: {vals.min():.3e}")
    vals = np.where(vals < 0, 0.0, vals)
    return vals / vals.sum(axis=-1, keepdims=True)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
