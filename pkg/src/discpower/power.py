"""Discording power: the largest symmetric discord a gate produces from
classical-classical states of fixed purity.

Only the Cartan kernel enters the search. Local factors after the kernel do
not change discord, and those before it are absorbed by scanning the local
bases of the classical state.

The search is staged:

1. A candidate pool of classical states at purity ``mu``: local basis
   directions on a hemisphere grid with spacing ``angle_step`` for each
   qubit, times probability vectors (deterministic extremal spectra plus
   seeded random ones, with all 24 slot assignments). Every extremal
   spectrum is paired with all axis-aligned bases; the rest of the budget is
   a seeded random draw from the full product.
2. Screening of every candidate with a coarse measurement grid.
3. Full discord evaluation of the ``top_k`` screened candidates and, when
   ``refine`` is on, Nelder-Mead over the four basis angles and the
   probability vector (kept on its support face at purity ``mu``).

The reported value is always a full-precision discord of the reported
achieving state.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .discord import DEFAULT_SEARCH, MeasurementSearch, concurrence, symmetric_discord
from .gates import CartanCoordinates, CartanGate, canonical_coordinates, cartan_kernel, normalize_coordinates
from .linalg import adjoint, tensor
from .optimize import batched_nelder_mead
from .states import ClassicalStateSpec, basis_from_angles, classical_matrix

SUPPORT_TOL = 1e-12
_PERMS = np.array(list(itertools.permutations(range(4))))


@dataclass(frozen=True)
class PowerSearchConfig:
    mu: float
    angle_step: float = 0.1 * np.pi
    prob_samples: int = 500
    refine: bool = True
    seed: int = 0
    budget: int = 100_000
    top_k: int = 12
    screen: MeasurementSearch = MeasurementSearch(n_theta=4, n_phi=8, refine=False)
    inner: MeasurementSearch = MeasurementSearch(n_theta=6, n_phi=12, method="newton")
    final: MeasurementSearch = DEFAULT_SEARCH
    refine_xtol: float = 1e-6
    refine_max_iter: int = 600

    def __post_init__(self):
        if not 0.25 - 1e-12 <= self.mu <= 1 + 1e-12:
            raise ValueError(f"purity {self.mu} outside [1/4, 1]")
        if self.prob_samples < 1 or self.budget < 1 or self.top_k < 1:
            raise ValueError("sample counts must be positive")
        if self.angle_step <= 0:
            raise ValueError("angle_step must be positive")
        ratio = np.pi / self.angle_step
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("angle_step must divide pi")

    @classmethod
    def full(cls, mu: float, **kw) -> "PowerSearchConfig":
        """Scan sized like a full-resolution run (~8e6 candidates); slow."""
        kw.setdefault("budget", 8_000_000)
        kw.setdefault("top_k", 32)
        return cls(mu=mu, **kw)


@dataclass(frozen=True)
class PowerResult:
    coords: CartanCoordinates
    mu: float
    dp: float
    spec: ClassicalStateSpec
    n_evals: int


# -- probability vectors at fixed purity -----------------------------------


def gate_coordinates(gate) -> CartanCoordinates:
    """Chamber coordinates of a CartanGate, a 4x4 unitary or a coordinate triple."""
    if isinstance(gate, CartanGate):
        return gate.coords.normalized()
    arr = np.asarray(gate)
    if arr.shape == (4, 4):
        return canonical_coordinates(arr)
    return normalize_coordinates(arr)


def _sum_zero_basis(s: int) -> np.ndarray:
    """Orthonormal basis (s, s-1) of the sum-zero subspace of R^s."""
    q, _ = np.linalg.qr(np.vstack([np.ones(s), np.eye(s)[: s - 1]]).T)
    return q[:, 1:]


def _sphere_points(dim: int, angles: np.ndarray) -> np.ndarray:
    """Unit vectors in R^dim from dim-1 spherical angles (dim in 1..3)."""
    angles = np.atleast_2d(angles)
    if dim == 1:
        return np.ones((len(angles), 1))
    if dim == 2:
        return np.column_stack([np.cos(angles[:, 0]), np.sin(angles[:, 0])])
    t, p = angles[:, 0], angles[:, 1]
    return np.column_stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)])


def _sphere_angles(v: np.ndarray) -> np.ndarray:
    v = np.atleast_2d(v)
    dim = v.shape[1]
    if dim == 1:
        return np.zeros((len(v), 0))
    if dim == 2:
        return np.arctan2(v[:, 1], v[:, 0])[:, None]
    return np.column_stack([np.arccos(np.clip(v[:, 2], -1, 1)), np.arctan2(v[:, 1], v[:, 0])])


def face_vectors(mu: float, support: int, angles: np.ndarray) -> np.ndarray:
    """Points 1/s + r E d(angles) with sum 1 and sum of squares mu on an s-level face."""
    r = np.sqrt(max(mu - 1.0 / support, 0.0))
    e = _sum_zero_basis(support)
    d = _sphere_points(support - 1, angles)
    return 1.0 / support + r * d @ e.T


def extremal_probabilities(mu: float, n_circle: int = 48) -> np.ndarray:
    """Deterministic spectra at purity mu: two-level, Werner-like and a ring of three-level ones."""
    out = []
    if mu >= 1 - 1e-12:
        out.append([1.0, 0, 0, 0])
    if mu >= 0.5 - 1e-12:
        x = 0.5 * (1 + np.sqrt(max(2 * mu - 1, 0.0)))
        out.append([x, 1 - x, 0, 0])
    w = np.sqrt(max(4 * mu - 1, 0.0) / 3)
    for ww in (-w, w):
        q = (1 - ww) / 4
        if 1 - 3 * q >= -1e-12:
            out.append([q, q, q, max(1 - 3 * q, 0.0)])
    if 1 / 3 - 1e-12 <= mu <= 1 + 1e-12:
        ang = 2 * np.pi * np.arange(n_circle) / n_circle
        ring = face_vectors(mu, 3, ang[:, None])
        ring = ring[np.all(ring >= -1e-12, axis=1)]
        out.extend(np.column_stack([np.clip(ring, 0, None), np.zeros(len(ring))]))
    p = np.clip(np.array(out, dtype=float), 0, None)
    return p / p.sum(axis=1, keepdims=True)


def random_probabilities(mu: float, count: int, rng: np.random.Generator, max_draws: int = 10**6) -> np.ndarray:
    """Dirichlet(1,1,1,1) directions pushed radially from the uniform point to purity mu.

    A direction is kept when the ray reaches purity mu before leaving the
    simplex. Returns at most ``count`` vectors.
    """
    r = np.sqrt(max(mu - 0.25, 0.0))
    if r == 0:
        return np.full((1, 4), 0.25)
    kept = []
    n_kept = 0
    drawn = 0
    while n_kept < count and drawn < max_draws:
        batch = max(4 * (count - n_kept), 256)
        d = rng.dirichlet(np.ones(4), size=batch) - 0.25
        drawn += batch
        norm = np.linalg.norm(d, axis=1)
        d = d[norm > 1e-15] / norm[norm > 1e-15, None]
        p = 0.25 + r * d
        ok = np.all(p >= 0, axis=1)
        kept.append(p[ok])
        n_kept += int(ok.sum())
    if not kept:
        return np.zeros((0, 4))
    p = np.vstack(kept)[:count]
    return p / p.sum(axis=1, keepdims=True)


def with_permutations(p: np.ndarray) -> np.ndarray:
    """All distinct slot assignments of each probability vector, order-stable."""
    allp = p[:, _PERMS].reshape(-1, 4)
    _, first = np.unique(np.round(allp, 12), axis=0, return_index=True)
    return allp[np.sort(first)]


# -- local bases -----------------------------------------------------------


def hemisphere_directions(step: float) -> np.ndarray:
    """(theta, phi) grid covering each measurement axis once (n and -n identified)."""
    nt = int(np.floor(0.5 * np.pi / step + 1e-9))
    nphi = int(np.ceil(2 * np.pi / step - 1e-9))
    out = [(0.0, 0.0)]
    for i in range(1, nt + 1):
        th = i * step
        for j in range(nphi):
            ph = j * step
            if abs(th - 0.5 * np.pi) < 1e-9 and ph >= np.pi - 1e-9:
                continue
            out.append((th, ph))
    return np.array(out)


def _axis_indices(dirs: np.ndarray) -> list[int]:
    targets = [(0.0, 0.0), (0.5 * np.pi, 0.0), (0.5 * np.pi, 0.5 * np.pi)]
    idx = []
    for t in targets:
        hit = np.where(np.all(np.abs(dirs - t) < 1e-9, axis=1))[0]
        if len(hit):
            idx.append(int(hit[0]))
    return idx


# -- evaluation ------------------------------------------------------------


def _evolve(kernel, probs, ang_a, ang_b):
    ba = basis_from_angles(ang_a[..., 0], ang_a[..., 1])
    bb = basis_from_angles(ang_b[..., 0], ang_b[..., 1])
    rho = classical_matrix(probs, ba, bb)
    return kernel @ rho @ adjoint(kernel)


def _spec(probs, ang_a, ang_b) -> ClassicalStateSpec:
    p = np.clip(np.asarray(probs, dtype=float), 0, None)
    return ClassicalStateSpec(
        p / p.sum(),
        basis_from_angles(ang_a[0], ang_a[1]),
        basis_from_angles(ang_b[0], ang_b[1]),
    )


def candidate_pool(cfg: PowerSearchConfig):
    """(probability vectors, basis-A angles, basis-B angles) for screening."""
    rng = np.random.default_rng(cfg.seed)
    extremal = with_permutations(extremal_probabilities(cfg.mu))
    sampled = with_permutations(random_probabilities(cfg.mu, cfg.prob_samples, rng))
    pool = np.vstack([extremal, sampled])
    dirs = hemisphere_directions(cfg.angle_step)
    axes = _axis_indices(dirs)

    pi, ai, bi = [], [], []
    for a in axes:
        for b in axes:
            pi.append(np.arange(len(extremal)))
            ai.append(np.full(len(extremal), a))
            bi.append(np.full(len(extremal), b))
    pi = np.concatenate(pi) if pi else np.zeros(0, int)
    ai = np.concatenate(ai) if ai else np.zeros(0, int)
    bi = np.concatenate(bi) if bi else np.zeros(0, int)

    full = len(pool) * len(dirs) ** 2
    rest = cfg.budget - len(pi)
    if rest > 0:
        if full <= rest:
            gp, ga, gb = np.meshgrid(np.arange(len(pool)), np.arange(len(dirs)), np.arange(len(dirs)), indexing="ij")
            extra = (gp.ravel(), ga.ravel(), gb.ravel())
        else:
            flat = rng.choice(full, size=rest, replace=False)
            extra = np.unravel_index(flat, (len(pool), len(dirs), len(dirs)))
        pi = np.concatenate([pi, extra[0]])
        ai = np.concatenate([ai, extra[1]])
        bi = np.concatenate([bi, extra[2]])
    return pool[pi], dirs[ai], dirs[bi]


def _top_k(values, k):
    order = np.argsort(-values, kind="stable")
    return order[:k]


def _refine(kernel, cfg, probs, ang_a, ang_b):
    """Local maximization from each seed; returns refined (probs, ang_a, ang_b)."""
    n = len(probs)
    out_p = probs.copy()
    out_a = ang_a.copy()
    out_b = ang_b.copy()
    support = probs > SUPPORT_TOL
    sizes = support.sum(axis=1)
    for s in np.unique(sizes):
        rows = np.where(sizes == s)[0]
        e = _sum_zero_basis(s) if s > 1 else np.zeros((1, 0))
        r = np.sqrt(max(cfg.mu - 1.0 / s, 0.0))
        slots = np.array([np.where(support[i])[0] for i in rows])
        if s > 1 and r > 0:
            d0 = (probs[rows][np.arange(len(rows))[:, None], slots] - 1.0 / s) @ e / r
            face0 = _sphere_angles(d0 / np.linalg.norm(d0, axis=1, keepdims=True))
        else:
            face0 = np.zeros((len(rows), 0))
        if s == 2:
            face0 = np.zeros((len(rows), 0))
            fixed = probs[rows]
        x0 = np.hstack([ang_a[rows], ang_b[rows], face0])

        def unpack(x, idx):
            pr = np.zeros((len(x), 4))
            if s > 2 and r > 0:
                vals = 1.0 / s + r * _sphere_points(s - 1, x[:, 4:]) @ e.T
                pr[np.arange(len(x))[:, None], slots[idx]] = vals
            elif s == 2:
                pr = fixed[idx].copy()
            else:
                pr[np.arange(len(x))[:, None], slots[idx]] = 1.0 / s
            return pr

        def fun(x, idx):
            pr = unpack(x, idx)
            bad = pr.min(axis=1) < 0
            rho = _evolve(kernel, np.clip(pr, 0, None), x[:, 0:2], x[:, 2:4])
            val = -symmetric_discord(rho, cfg.inner)
            return np.where(bad, 1.0 - pr.min(axis=1), val)

        step = np.full(x0.shape[1], 0.5 * cfg.angle_step)
        res = batched_nelder_mead(fun, x0, step, xtol=cfg.refine_xtol, max_iter=cfg.refine_max_iter)
        pr = unpack(res.x, np.arange(len(rows)))
        out_p[rows] = np.clip(pr, 0, None)
        out_a[rows] = res.x[:, 0:2]
        out_b[rows] = res.x[:, 2:4]
    return out_p, out_a, out_b


def discording_power(gate, cfg: PowerSearchConfig) -> PowerResult:
    """Maximum symmetric discord of U_c rho U_c^dag over classical states of purity cfg.mu."""
    coords = gate_coordinates(gate)
    kernel = cartan_kernel(coords)
    probs, ang_a, ang_b = candidate_pool(cfg)
    n_evals = len(probs)
    screen = symmetric_discord(_evolve(kernel, probs, ang_a, ang_b), cfg.screen)

    top = _top_k(screen, cfg.top_k)
    cand_p, cand_a, cand_b = probs[top], ang_a[top], ang_b[top]
    if cfg.refine:
        rp, ra, rb = _refine(kernel, cfg, cand_p, cand_a, cand_b)
        cand_p = np.vstack([cand_p, rp])
        cand_a = np.vstack([cand_a, ra])
        cand_b = np.vstack([cand_b, rb])
    specs = [_spec(p, a, b) for p, a, b in zip(cand_p, cand_a, cand_b)]
    rhos = np.stack([kernel @ classical_matrix(s.probs, s.basis_a, s.basis_b) @ adjoint(kernel) for s in specs])
    final = symmetric_discord(rhos, cfg.final)
    n_evals += len(specs)
    k = int(_top_k(final, 1)[0])
    # replay through the single-state path so the reported value is reproducible
    dp = evaluate_spec(coords, specs[k], cfg.final)
    return PowerResult(coords, cfg.mu, float(max(dp, 0.0)), specs[k], n_evals)


def evaluate_spec(gate, spec: ClassicalStateSpec, search: MeasurementSearch = DEFAULT_SEARCH) -> float:
    """Symmetric discord of U_c rho_cl U_c^dag for one classical spec."""
    kernel = cartan_kernel(gate_coordinates(gate))
    rho = kernel @ classical_matrix(spec.probs, spec.basis_a, spec.basis_b) @ adjoint(kernel)
    return float(symmetric_discord(rho[None], search)[0])


def _power_task(args):
    gate, cfg = args
    return discording_power(gate, cfg)


def _map(func, items, workers):
    if workers and workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(func, items))
    return [func(it) for it in items]


def power_curve(gate, mu_grid, cfg: PowerSearchConfig | None = None, workers: int = 1) -> list[PowerResult]:
    """One discording-power value per purity; ``cfg`` supplies everything but ``mu``."""
    base = cfg or PowerSearchConfig(mu=0.25)
    items = [(gate, replace(base, mu=float(mu))) for mu in mu_grid]
    return _map(_power_task, items, workers)


FAMILIES = {
    "a00": lambda a: (a, 0.0, 0.0),
    "aa0": lambda a: (a, a, 0.0),
}


def angle_sweep(family: str, mu: float, alpha_grid, cfg: PowerSearchConfig | None = None, workers: int = 1):
    """[(alpha, PowerResult)] for the gate families U_c(a,0,0) ("a00") or U_c(a,a,0) ("aa0")."""
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {sorted(FAMILIES)}")
    alpha_grid = [float(a) for a in alpha_grid]
    if any(a < -1e-12 or a > np.pi / 4 + 1e-12 for a in alpha_grid):
        raise ValueError("alpha must lie in [0, pi/4]")
    base = replace(cfg, mu=mu) if cfg else PowerSearchConfig(mu=mu)
    items = [(FAMILIES[family](a), base) for a in alpha_grid]
    return list(zip(alpha_grid, _map(_power_task, items, workers)))


# -- preimages -------------------------------------------------------------


@dataclass(frozen=True)
class PreimageResult:
    """Outcome of a preimage search.

    When nothing is found, ``witness_concurrence`` is the smallest concurrence
    of U^dag (K_A x K_B) target (K_A x K_B)^dag U over the sampled local
    rotations and ``witness_refined`` the value after continuous polishing.
    """

    found: bool
    spec: ClassicalStateSpec | None
    residual: float
    witness_concurrence: float = float("nan")
    witness_refined: float = float("nan")
    witness_locals: tuple = field(default=())


class LocalMinimum(NamedTuple):
    grid_value: float
    grid_angles: tuple
    value: float
    angles: tuple


def _offdiag_residual(sigma, ang):
    """Frobenius norm of the off-diagonal part of sigma in the product basis."""
    ba = basis_from_angles(ang[:, 0], ang[:, 1])
    bb = basis_from_angles(ang[:, 2], ang[:, 3])
    u = tensor(ba, bb)
    m = adjoint(u) @ sigma @ u
    diag = np.einsum("...ii->...i", m)
    return np.sqrt(np.maximum(np.sum(np.abs(m) ** 2, axis=(-1, -2)) - np.sum(np.abs(diag) ** 2, axis=-1), 0.0))


def _su2(angles):
    """ZYZ Euler rotations, broadcasting over leading axes of angles (..., 3)."""
    a, b, c = angles[..., 0], angles[..., 1], angles[..., 2]
    u = np.empty(angles.shape[:-1] + (2, 2), dtype=complex)
    u[..., 0, 0] = np.exp(-0.5j * (a + c)) * np.cos(b / 2)
    u[..., 0, 1] = -np.exp(-0.5j * (a - c)) * np.sin(b / 2)
    u[..., 1, 0] = np.exp(0.5j * (a - c)) * np.sin(b / 2)
    u[..., 1, 1] = np.exp(0.5j * (a + c)) * np.cos(b / 2)
    return u


def local_min_concurrence(gate, target, steps: int = 5, refine: bool = True) -> LocalMinimum:
    """min over local K_A, K_B of C(U^dag (K_A x K_B) target (K_A x K_B)^dag U).

    Euler-angle grid with ``steps`` points per angle, then Nelder-Mead from
    the best grid points.
    """
    u = cartan_kernel(gate_coordinates(gate))
    target = np.asarray(target, dtype=complex)
    g1 = 2 * np.pi * np.arange(steps) / steps
    g2 = np.pi * np.arange(steps + 1) / steps
    grid = np.array(list(itertools.product(g1, g2, g1, g1, g2, g1)))

    def conc(x, idx=None):
        k = tensor(_su2(x[:, :3]), _su2(x[:, 3:]))
        rho = adjoint(u) @ k @ target @ adjoint(k) @ u
        return concurrence(rho)

    vals = np.concatenate([conc(grid[i : i + 4096]) for i in range(0, len(grid), 4096)])
    order = _top_k(-vals, 4)
    grid_x, grid_v = tuple(grid[order[0]]), float(vals[order[0]])
    best_x, best_v = grid_x, grid_v
    if refine:
        res = batched_nelder_mead(conc, grid[order], step=0.3, xtol=1e-7, max_iter=2000)
        j = int(np.argmin(res.fun))
        if res.fun[j] < best_v:
            best_x, best_v = tuple(res.x[j]), float(res.fun[j])
    return LocalMinimum(grid_v, grid_x, best_v, best_x)


def preimage_witness(gate, target, angle_step: float = 0.1 * np.pi, tol: float = 1e-6) -> PreimageResult:
    """Look for a classical state that the kernel maps onto ``target``.

    Scans product bases on the ``angle_step`` grid for one that diagonalizes
    U^dag target U, refining the best cells. On failure, reports the minimum
    concurrence of U^dag target U over sampled local rotations of the target
    (positive: none of the sampled rotations has a separable preimage) and
    the continuously refined minimum, which can reach zero when a separable
    but non-classical preimage exists.
    """
    u = cartan_kernel(gate_coordinates(gate))
    target = np.asarray(target, dtype=complex)
    sigma = adjoint(u) @ target @ u
    dirs = hemisphere_directions(angle_step)
    ia, ib = np.meshgrid(np.arange(len(dirs)), np.arange(len(dirs)), indexing="ij")
    ang = np.hstack([dirs[ia.ravel()], dirs[ib.ravel()]])
    res0 = _offdiag_residual(sigma, ang)
    seeds = ang[_top_k(-res0, 8)]
    res = batched_nelder_mead(
        lambda x, idx: _offdiag_residual(sigma, x), seeds, step=0.5 * angle_step, xtol=1e-12, max_iter=3000
    )
    j = int(np.argmin(res.fun))
    best_ang, best_res = (res.x[j], float(res.fun[j])) if res.fun[j] < res0.min() else (ang[np.argmin(res0)], float(res0.min()))
    if best_res <= tol:
        ba = basis_from_angles(best_ang[0], best_ang[1])
        bb = basis_from_angles(best_ang[2], best_ang[3])
        uab = tensor(ba, bb)
        probs = np.real(np.diagonal(adjoint(uab) @ sigma @ uab))
        probs = np.clip(probs, 0, None)
        return PreimageResult(True, ClassicalStateSpec(probs / probs.sum(), ba, bb), best_res)
    lm = local_min_concurrence(gate, target)
    return PreimageResult(False, None, best_res, lm.grid_value, lm.value, lm.angles)
