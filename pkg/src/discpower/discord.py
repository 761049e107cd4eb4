"""Quantum discord of two-qubit states under projective measurements.

A state is handled through its Pauli expansion

    rho = 1/4 (I + a.sigma (x) I + I (x) b.sigma + sum_ij T_ij sigma_i (x) sigma_j).

Measuring qubit A along the Bloch direction n gives outcome probabilities
p = (1 +- a.n)/2 and leaves B with Bloch vector (b +- T^T n)/(1 +- a.n), so
the conditional entropy is a cheap closed form that vectorizes over both
states and directions. Directions n and -n define the same measurement;
the search runs over the upper hemisphere.

Entropies are in bits. The one-way discord labelled ``"AB"`` measures qubit
A and conditions B.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import PAULIS, SY, hermitian_eigvals, clip_spectrum
from .optimize import batched_nelder_mead
from .states import as_array, binary_entropy_bloch, entropy_from_spectrum

PROB_CUTOFF = 1e-12
_PP = np.einsum("aij,bkl->abikjl", PAULIS, PAULIS).reshape(4, 4, 4, 4)
_SYSY = np.kron(SY, SY)


@dataclass(frozen=True)
class ProjectiveMeasurement:
    """Rank-one projectors onto +-(sin t cos f, sin t sin f, cos t)."""

    theta: float = 0.0
    phi: float = 0.0

    @property
    def direction(self) -> np.ndarray:
        return bloch_direction(self.theta, self.phi)

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.direction
        ns = np.einsum("i,ijk->jk", n, PAULIS[1:])
        eye = PAULIS[0]
        return 0.5 * (eye + ns), 0.5 * (eye - ns)


@dataclass(frozen=True)
class MeasurementSearch:
    """Settings for minimizing conditional entropy over measurement directions.

    The grid has ``n_theta + 1`` polar values in [0, pi/2] and ``n_phi``
    azimuths in [0, 2 pi); doubling both sizes gives a superset of points.
    """

    n_theta: int = 24
    n_phi: int = 48
    refine: bool = True
    n_starts: int = 3
    xtol: float = 1e-8
    ftol: float = 1e-15
    max_iter: int = 400
    chunk: int = 1024
    method: str = "nelder-mead"
    newton_iter: int = 8

    def grid(self) -> np.ndarray:
        th = 0.5 * np.pi * np.arange(self.n_theta + 1) / self.n_theta
        ph = 2 * np.pi * np.arange(self.n_phi) / self.n_phi
        t, p = np.meshgrid(th[1:], ph, indexing="ij")
        angles = np.column_stack([t.ravel(), p.ravel()])
        return np.vstack([[0.0, 0.0], angles])


DEFAULT_SEARCH = MeasurementSearch()


@dataclass(frozen=True)
class DiscordReport:
    mutual_info: float
    classical_ab: float
    classical_ba: float
    discord_ab: float
    discord_ba: float
    symmetric: float
    angles_ab: tuple[float, float] = field(default=(0.0, 0.0))
    angles_ba: tuple[float, float] = field(default=(0.0, 0.0))


def bloch_direction(theta, phi) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def pauli_components(rho) -> np.ndarray:
    """R[mu, nu] = tr(rho sigma_mu (x) sigma_nu), mu, nu in (I, x, y, z)."""
    return np.einsum("abij,...ji->...ab", _PP, as_array(rho)).real


def bloch_data(rho, side: str = "A"):
    """(m, o, T): Bloch vectors of the measured and other qubit and correlations.

    ``T`` rows are indexed by the measured qubit.
    """
    r = pauli_components(rho)
    if side == "A":
        return r[..., 1:, 0], r[..., 0, 1:], r[..., 1:, 1:]
    if side == "B":
        return r[..., 0, 1:], r[..., 1:, 0], np.swapaxes(r[..., 1:, 1:], -1, -2)
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def _conditional_entropy(m, o, t, n):
    """sum_k p_k S(rho_other^k) for states (N,...) and directions n (N, G, 3)."""
    s = np.einsum("ni,ngi->ng", m, n)
    tn = np.einsum("nij,ngi->ngj", t, n)
    out = np.zeros(s.shape)
    for sign in (1.0, -1.0):
        w = 1.0 + sign * s
        v = np.linalg.norm(o[:, None, :] + sign * tn, axis=-1)
        ok = w > 2 * PROB_CUTOFF
        r = np.where(ok, v / np.where(ok, w, 1.0), 0.0)
        out += np.where(ok, 0.5 * w * binary_entropy_bloch(r), 0.0)
    return out


def conditional_entropy_after_measurement(rho, side: str, m: ProjectiveMeasurement) -> float:
    """Average entropy of the unmeasured qubit after measuring ``side`` with ``m``."""
    mv, ov, t = bloch_data(np.asarray(as_array(rho))[None], side)
    n = m.direction[None, None, :]
    return float(_conditional_entropy(mv, ov, t, n)[0, 0])


def _min_conditional_entropy_chunk(m, o, t, search: MeasurementSearch):
    grid = search.grid()
    dirs = bloch_direction(grid[:, 0], grid[:, 1])
    vals = _conditional_entropy(m, o, t, np.broadcast_to(dirs, (len(m),) + dirs.shape))
    k = np.argmin(vals, axis=1)
    best = vals[np.arange(len(m)), k]
    best_ang = grid[k]
    if not search.refine:
        return best, best_ang

    if search.method == "newton":
        val, n = _newton_polish(m, o, t, dirs[k], best, search.newton_iter, np.pi / search.n_phi)
        better = val < best
        ang = np.column_stack([np.arccos(np.clip(n[:, 2], -1, 1)), np.arctan2(n[:, 1], n[:, 0])])
        return np.where(better, val, best), np.where(better[:, None], ang, best_ang)

    n_starts = min(search.n_starts, len(grid))
    starts = np.argsort(vals, axis=1, kind="stable")[:, :n_starts]
    x0 = grid[starts].reshape(-1, 2)
    owner = np.repeat(np.arange(len(m)), n_starts)

    def fun(x, idx):
        own = owner[idx]
        n = bloch_direction(x[:, 0], x[:, 1])[:, None, :]
        return _conditional_entropy(m[own], o[own], t[own], n)[:, 0]

    step = (0.25 * np.pi / search.n_theta, np.pi / search.n_phi)
    res = batched_nelder_mead(
        fun, x0, step, xtol=search.xtol, max_iter=search.max_iter, ftol=search.ftol
    )
    fr = res.fun.reshape(len(m), n_starts)
    xr = res.x.reshape(len(m), n_starts, 2)
    j = np.argmin(fr, axis=1)
    rows = np.arange(len(m))
    better = fr[rows, j] < best
    best = np.where(better, fr[rows, j], best)
    best_ang = np.where(better[:, None], xr[rows, j], best_ang)
    return best, best_ang


_STENCIL = np.array([[1, 0], [-1, 0], [0, 1], [0, -1], [1, 1], [-1, -1]], dtype=float)


def _tangent_frame(n):
    ref = np.where(np.abs(n[:, 2:3]) < 0.9, [[0.0, 0.0, 1.0]], [[1.0, 0.0, 0.0]])
    e1 = np.cross(n, ref)
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    return e1, np.cross(n, e1)


def _newton_polish(m, o, t, n, f0, iters, radius, h=1e-4):
    """Safeguarded Newton steps in the tangent plane, finite-difference derivatives."""
    n = n.copy()
    f = f0.copy()
    radius = np.full(len(n), radius)
    for _ in range(iters):
        e1, e2 = _tangent_frame(n)
        pts = n[:, None, :] + h * (_STENCIL[None, :, 0:1] * e1[:, None, :] + _STENCIL[None, :, 1:2] * e2[:, None, :])
        pts /= np.linalg.norm(pts, axis=-1, keepdims=True)
        fs = _conditional_entropy(m, o, t, pts)
        g = np.column_stack([fs[:, 0] - fs[:, 1], fs[:, 2] - fs[:, 3]]) / (2 * h)
        hxx = (fs[:, 0] - 2 * f + fs[:, 1]) / h**2
        hyy = (fs[:, 2] - 2 * f + fs[:, 3]) / h**2
        hxy = (fs[:, 4] + fs[:, 5] + 2 * f - fs[:, 0] - fs[:, 1] - fs[:, 2] - fs[:, 3]) / (2 * h**2)
        det = hxx * hyy - hxy**2
        pd = (hxx > 0) & (det > 0)
        safe = np.where(pd, det, 1.0)
        step = np.where(
            pd[:, None],
            -np.column_stack([hyy * g[:, 0] - hxy * g[:, 1], hxx * g[:, 1] - hxy * g[:, 0]]) / safe[:, None],
            -g,
        )
        norm = np.linalg.norm(step, axis=1)
        step *= np.minimum(1.0, radius / np.maximum(norm, 1e-300))[:, None]
        trial = n + step[:, 0:1] * e1 + step[:, 1:2] * e2
        trial /= np.linalg.norm(trial, axis=1, keepdims=True)
        ft = _conditional_entropy(m, o, t, trial[:, None, :])[:, 0]
        ok = ft < f
        n = np.where(ok[:, None], trial, n)
        f = np.where(ok, ft, f)
        radius = np.where(ok, radius, 0.25 * radius)
    return f, n


def min_conditional_entropy(rho, side: str = "A", search: MeasurementSearch = DEFAULT_SEARCH):
    """Minimum over projective measurements on ``side`` of the conditional entropy.

    Batch-aware: ``rho`` of shape (..., 4, 4) gives values of shape (...) and
    argmin angles (theta, phi) of shape (..., 2).
    """
    rho = as_array(rho)
    batch = rho.shape[:-2]
    flat = rho.reshape((-1, 4, 4))
    m, o, t = bloch_data(flat, side)
    vals = np.empty(len(flat))
    angs = np.empty((len(flat), 2))
    for lo in range(0, len(flat), search.chunk):
        sl = slice(lo, lo + search.chunk)
        vals[sl], angs[sl] = _min_conditional_entropy_chunk(m[sl], o[sl], t[sl], search)
    return vals.reshape(batch), angs.reshape(batch + (2,))


def _entropies(rho):
    """S(rho_AB), S(rho_A), S(rho_B) for a batch of states."""
    r = pauli_components(rho)
    s_ab = entropy_from_spectrum(clip_spectrum(hermitian_eigvals(rho)))
    s_a = binary_entropy_bloch(np.linalg.norm(r[..., 1:, 0], axis=-1))
    s_b = binary_entropy_bloch(np.linalg.norm(r[..., 0, 1:], axis=-1))
    return s_ab, s_a, s_b


def mutual_information(rho):
    """I = S(rho_A) + S(rho_B) - S(rho_AB) in bits (batch-aware)."""
    s_ab, s_a, s_b = _entropies(as_array(rho))
    out = s_a + s_b - s_ab
    return float(out) if np.ndim(out) == 0 else out


def classical_correlation(rho, measured_side: str = "A", search: MeasurementSearch = DEFAULT_SEARCH):
    """Classical correlation from measuring ``measured_side``; returns (C, (theta, phi))."""
    rho = as_array(rho)
    _, s_a, s_b = _entropies(rho)
    s_other = s_b if measured_side == "A" else s_a
    h, ang = min_conditional_entropy(rho, measured_side, search)
    c = s_other - h
    if np.ndim(c) == 0:
        return float(c), (float(ang[0]), float(ang[1]))
    return c, ang


@dataclass(frozen=True)
class DiscordArrays:
    """Column-oriented discord results for a batch of states."""

    mutual_info: np.ndarray
    classical_ab: np.ndarray
    classical_ba: np.ndarray
    discord_ab: np.ndarray
    discord_ba: np.ndarray
    symmetric: np.ndarray
    angles_ab: np.ndarray
    angles_ba: np.ndarray


def discord_batch(rho, search: MeasurementSearch = DEFAULT_SEARCH) -> DiscordArrays:
    rho = as_array(rho)
    s_ab, s_a, s_b = _entropies(rho)
    mi = s_a + s_b - s_ab
    h_ab, ang_ab = min_conditional_entropy(rho, "A", search)
    h_ba, ang_ba = min_conditional_entropy(rho, "B", search)
    c_ab = s_b - h_ab
    c_ba = s_a - h_ba
    d_ab = mi - c_ab
    d_ba = mi - c_ba
    return DiscordArrays(mi, c_ab, c_ba, d_ab, d_ba, 0.5 * (d_ab + d_ba), ang_ab, ang_ba)


def symmetric_discord(rho, search: MeasurementSearch = DEFAULT_SEARCH):
    out = discord_batch(rho, search).symmetric
    return float(out) if np.ndim(out) == 0 else out


def discord(rho, search: MeasurementSearch = DEFAULT_SEARCH) -> DiscordReport:
    """Full discord report for a single two-qubit state."""
    arr = discord_batch(np.asarray(as_array(rho))[None], search)
    return DiscordReport(
        mutual_info=float(arr.mutual_info[0]),
        classical_ab=float(arr.classical_ab[0]),
        classical_ba=float(arr.classical_ba[0]),
        discord_ab=float(arr.discord_ab[0]),
        discord_ba=float(arr.discord_ba[0]),
        symmetric=float(arr.symmetric[0]),
        angles_ab=tuple(float(x) for x in arr.angles_ab[0]),
        angles_ba=tuple(float(x) for x in arr.angles_ba[0]),
    )


def concurrence(rho):
    """Wootters concurrence (batch-aware)."""
    rho = as_array(rho)
    vals, vecs = np.linalg.eigh(0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2))))
    vals = np.clip(vals, 0.0, None)
    sq = (vecs * np.sqrt(vals)[..., None, :]) @ np.conj(np.swapaxes(vecs, -1, -2))
    flipped = _SYSY @ np.conj(rho) @ _SYSY
    lam = np.sqrt(np.clip(hermitian_eigvals(sq @ flipped @ sq), 0.0, None))
    c = np.maximum(0.0, lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3])
    return float(c) if np.ndim(c) == 0 else c
