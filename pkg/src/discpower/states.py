"""Two-qubit density matrices, classical-classical states and random sampling."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .linalg import (
    CLIP_TOL,
    HERMITIAN_TOL,
    clip_spectrum,
    hermiticity_error,
    hermitian_eigvals,
    is_unitary,
    tensor,
)

TRACE_TOL = 1e-9
PROB_TOL = 1e-12
RANK_TOL = 1e-9


@dataclass(frozen=True)
class DensityMatrix:
    """A validated two-qubit (or single-qubit) density matrix."""

    mat: np.ndarray

    def __post_init__(self):
        m = np.array(self.mat, dtype=complex)
        if m.shape not in ((2, 2), (4, 4)):
            raise ValueError(f"density matrix must be 2x2 or 4x4, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("density matrix has non-finite entries")
        if hermiticity_error(m) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace is {np.trace(m).real!r}, expected 1")
        vals = hermitian_eigvals(m)
        if vals.min() < -CLIP_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {vals.min():.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return clip_spectrum(hermitian_eigvals(self.mat))

    def purity(self) -> float:
        return purity(self.mat)

    def rank(self, tol: float = RANK_TOL) -> int:
        return int(np.sum(self.eigenvalues() > tol))


def as_array(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.mat
    return np.asarray(rho, dtype=complex)


def purity(rho) -> float | np.ndarray:
    """tr(rho^2); batch-aware."""
    m = as_array(rho)
    p = np.einsum("...ij,...ji->...", m, m).real
    return float(p) if np.ndim(p) == 0 else p


def entropy_from_spectrum(vals: np.ndarray) -> np.ndarray:
    """Shannon entropy in bits along the last axis, with 0 log 0 = 0."""
    vals = np.asarray(vals, dtype=float)
    safe = np.where(vals > 0, vals, 1.0)
    return -np.sum(np.where(vals > 0, vals * np.log2(safe), 0.0), axis=-1)


def von_neumann_entropy(rho) -> float | np.ndarray:
    """S(rho) = -tr rho log2 rho for 2x2 or 4x4 states (batch-aware)."""
    vals = clip_spectrum(hermitian_eigvals(as_array(rho)))
    s = entropy_from_spectrum(vals)
    return float(s) if np.ndim(s) == 0 else s


def binary_entropy_bloch(r: np.ndarray) -> np.ndarray:
    """Entropy in bits of a qubit whose Bloch vector has length ``r``."""
    r = np.clip(r, 0.0, 1.0)
    lp = 0.5 * (1.0 + r)
    lm = 0.5 * (1.0 - r)
    out = -lp * np.log2(lp)
    return out - np.where(lm > 0, lm * np.log2(np.where(lm > 0, lm, 1.0)), 0.0)


def basis_from_angles(theta, phi) -> np.ndarray:
    """Qubit basis whose first column points along Bloch angles (theta, phi).

    Broadcasts over array-valued angles; output shape is ``shape + (2, 2)``.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    e = np.exp(1j * phi)
    u = np.empty(np.broadcast(theta, phi).shape + (2, 2), dtype=complex)
    u[..., 0, 0] = c
    u[..., 1, 0] = e * s
    u[..., 0, 1] = -np.conj(e) * s
    u[..., 1, 1] = c
    return u


@dataclass(frozen=True)
class ClassicalStateSpec:
    """Weights p[r, s] on the product basis |alpha_r> (x) |beta_s>.

    ``probs`` is flattened as p[2 r + s]; ``basis_a`` and ``basis_b`` hold the
    local basis vectors as columns.
    """

    probs: np.ndarray
    basis_a: np.ndarray = field(default_factory=lambda: np.eye(2, dtype=complex))
    basis_b: np.ndarray = field(default_factory=lambda: np.eye(2, dtype=complex))

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).reshape(-1)
        if p.shape != (4,):
            raise ValueError("probs must have 4 entries")
        if np.any(p < -PROB_TOL) or abs(p.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"probs must be a probability vector, got {p}")
        p = np.clip(p, 0.0, None)
        for name in ("basis_a", "basis_b"):
            u = np.array(getattr(self, name), dtype=complex)
            if u.shape != (2, 2) or not is_unitary(u):
                raise ValueError(f"{name} must be a 2x2 unitary")
            u.setflags(write=False)
            object.__setattr__(self, name, u)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def purity(self) -> float:
        return float(np.sum(self.probs**2))


def classical_matrix(probs, basis_a, basis_b) -> np.ndarray:
    """Batch form of make_classical: arrays (..., 4), (..., 2, 2), (..., 2, 2)."""
    u = tensor(basis_a, basis_b)
    return np.einsum("...ik,...k,...jk->...ij", u, np.asarray(probs, dtype=complex), u.conj())


def make_classical(spec: ClassicalStateSpec) -> DensityMatrix:
    return DensityMatrix(classical_matrix(spec.probs, spec.basis_a, spec.basis_b))


def ginibre_states(rank: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` states rho = G G^dag / tr(G G^dag) with G a 4 x rank Ginibre matrix."""
    g = rng.standard_normal((count, 4, rank)) + 1j * rng.standard_normal((count, 4, rank))
    rho = g @ np.conj(np.swapaxes(g, -1, -2))
    return rho / np.trace(rho, axis1=-2, axis2=-1).real[:, None, None]


@dataclass(frozen=True)
class RandomStateConfig:
    rank: int
    sample_count: int
    seed: int = 0

    def __post_init__(self):
        if self.rank not in (1, 2, 3, 4):
            raise ValueError("rank must be 1, 2, 3 or 4")
        if self.sample_count < 1:
            raise ValueError("sample_count must be positive")


def sample_random_states(cfg: RandomStateConfig) -> np.ndarray:
    """Seeded batch of random states of exact numerical rank ``cfg.rank``.

    Uses numpy's PCG64 generator seeded with ``cfg.seed``. Draws whose
    numerical rank falls short (an eigenvalue at or below 1e-9) are redrawn,
    so the output is deterministic per seed.
    """
    rng = np.random.default_rng(cfg.seed)
    out = ginibre_states(cfg.rank, cfg.sample_count, rng)
    while True:
        vals = hermitian_eigvals(out)
        bad = vals[:, cfg.rank - 1] <= RANK_TOL
        if not bad.any():
            return out
        out[bad] = ginibre_states(cfg.rank, int(bad.sum()), rng)


# JSON state files: {"dim": 4, "re": [[...]], "im": [[...]]}, row-major.


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"dim": m.shape[0], "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ValueError(f"matrix JSON entries do not match dim={dim}")
    return re + 1j * im


def load_matrix(path) -> np.ndarray:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from exc
    return matrix_from_json(obj)


def load_state(path) -> DensityMatrix:
    return DensityMatrix(load_matrix(path))


def save_state(path, rho) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(as_array(rho))))
