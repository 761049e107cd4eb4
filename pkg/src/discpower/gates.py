"""Two-qubit gates in Cartan form and canonical-coordinate extraction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linalg import I2, I4, SX, SY, SZ, SWAP, adjoint, is_unitary, tensor, unitarity_error
from .states import DensityMatrix, as_array

PI4 = np.pi / 4
_PAIRS = (np.kron(SX, SX), np.kron(SY, SY), np.kron(SZ, SZ))

# columns are Bell states in which every sigma_j (x) sigma_j is diagonal
MAGIC = np.array(
    [[1, 1j, 0, 0], [0, 0, 1j, 1], [0, 0, 1j, -1], [1, -1j, 0, 0]], dtype=complex
) / np.sqrt(2)


class CartanCoordinates(NamedTuple):
    theta_x: float
    theta_y: float
    theta_z: float

    def normalized(self) -> "CartanCoordinates":
        return normalize_coordinates(self)

    def in_chamber(self, tol: float = 1e-9) -> bool:
        x, y, z = self
        return -tol <= z <= y + tol and y <= x + tol and x <= PI4 + tol


def normalize_coordinates(coords) -> CartanCoordinates:
    """Fold angles into 0 <= theta_z <= theta_y <= theta_x <= pi/4.

    Uses the period pi/2 of each angle, sign flips, and relabelling of the
    axes. A simultaneous flip of all three signs maps a gate to its complex
    conjugate; the chamber identifies the two.
    """
    t = np.mod(np.asarray(coords, dtype=float), np.pi / 2)
    t = np.where(t > PI4, t - np.pi / 2, t)
    t = np.sort(np.abs(t))[::-1]
    return CartanCoordinates(*(float(v) for v in t))


def cartan_kernel(coords) -> np.ndarray:
    """exp(-i sum_j theta_j sigma_j (x) sigma_j), built from commuting factors."""
    u = I4.copy()
    for theta, pair in zip(coords, _PAIRS):
        u = u @ (np.cos(theta) * I4 - 1j * np.sin(theta) * pair)
    return u


def canonical_coordinates(u: np.ndarray, tol: float = 1e-8) -> CartanCoordinates:
    """Chamber coordinates of the Cartan kernel of a two-qubit unitary.

    In the magic basis local gates are real orthogonal, so the spectrum of
    Ub^T Ub (Ub = M^dag U M, normalized to unit determinant) equals that of
    the squared kernel, whose eigenphases are -2(+-theta_x +- theta_y +- theta_z).
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise ValueError(f"expected a 4x4 unitary, got shape {u.shape}")
    if unitarity_error(u) > tol:
        raise ValueError("matrix is not unitary within tolerance")
    u = u / np.linalg.det(u) ** 0.25
    ub = adjoint(MAGIC) @ u @ MAGIC
    lam = -0.5 * np.angle(np.linalg.eigvals(ub.T @ ub))
    # lam are the kernel eigenphases (mod pi) for the Bell labels in some order;
    # any labelling gives a locally equivalent point before folding.
    tx = 0.5 * (lam[0] + lam[2])
    ty = 0.5 * (lam[1] + lam[2])
    tz = 0.5 * (lam[0] + lam[1])
    return normalize_coordinates((tx, ty, tz))


@dataclass(frozen=True)
class CartanGate:
    """U = (post_a (x) post_b) U_c(coords) (pre_a (x) pre_b).

    ``unitary`` overrides the assembled matrix when the gate was given as an
    explicit matrix (the local factors are not reconstructed).
    """

    coords: CartanCoordinates
    pre_a: np.ndarray | None = None
    pre_b: np.ndarray | None = None
    post_a: np.ndarray | None = None
    post_b: np.ndarray | None = None
    unitary: np.ndarray | None = None
    name: str | None = None

    def matrix(self) -> np.ndarray:
        if self.unitary is not None:
            return np.asarray(self.unitary, dtype=complex)
        pre = tensor(_or_eye(self.pre_a), _or_eye(self.pre_b))
        post = tensor(_or_eye(self.post_a), _or_eye(self.post_b))
        return post @ cartan_kernel(self.coords) @ pre

    def kernel(self) -> np.ndarray:
        return cartan_kernel(self.coords)


def _or_eye(m):
    return I2 if m is None else np.asarray(m, dtype=complex)


def gate_from_matrix(u: np.ndarray, name: str | None = None) -> CartanGate:
    return CartanGate(canonical_coordinates(u), unitary=np.asarray(u, dtype=complex), name=name)


def gate_from_coords(coords) -> CartanGate:
    return CartanGate(CartanCoordinates(*(float(c) for c in coords)))


_S = 0.5 * (1 + 1j)
NAMED_MATRICES = {
    "identity": I4,
    "cnot": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "swap": SWAP,
    "sqrt_swap": np.array(
        [[1, 0, 0, 0], [0, _S, np.conj(_S), 0], [0, np.conj(_S), _S, 0], [0, 0, 0, 1]],
        dtype=complex,
    ),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
    "iswap": np.array([[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=complex),
}


def named_gate(name: str) -> CartanGate:
    key = name.lower().replace("-", "_")
    if key not in NAMED_MATRICES:
        raise ValueError(f"unknown gate {name!r}; choose from {sorted(NAMED_MATRICES)}")
    return gate_from_matrix(NAMED_MATRICES[key], name=key)


def apply(gate, rho):
    """U rho U^dag for a CartanGate or a raw 4x4 unitary."""
    u = gate.matrix() if isinstance(gate, CartanGate) else np.asarray(gate, dtype=complex)
    out = u @ as_array(rho) @ adjoint(u)
    return DensityMatrix(out) if isinstance(rho, DensityMatrix) else out


def check_unitary(u: np.ndarray) -> bool:
    return is_unitary(u)
