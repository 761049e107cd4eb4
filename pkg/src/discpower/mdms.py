"""Maximally discordant mixed states and the discord-purity boundary."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discord import DEFAULT_SEARCH, MeasurementSearch, symmetric_discord
from .linalg import I4, SX
from .states import ClassicalStateSpec

BELL_STATES = {
    "phi_plus": np.array([1, 0, 0, 1]) / np.sqrt(2),
    "phi_minus": np.array([1, 0, 0, -1]) / np.sqrt(2),
    "psi_plus": np.array([0, 1, 1, 0]) / np.sqrt(2),
    "psi_minus": np.array([0, 1, -1, 0]) / np.sqrt(2),
    # images of the logical basis under the CNOT and sqrt(SWAP) kernels
    "phi_i": np.array([1, 0, 0, 1j]) / np.sqrt(2),
    "psi_i": np.array([0, 1, 1j, 0]) / np.sqrt(2),
}
EDGE_TOL = 1e-12


def _bell(bell_choice) -> np.ndarray:
    if isinstance(bell_choice, str):
        try:
            return BELL_STATES[bell_choice].astype(complex)
        except KeyError:
            raise ValueError(f"unknown Bell state {bell_choice!r}") from None
    v = np.asarray(bell_choice, dtype=complex)
    return v / np.linalg.norm(v)


def werner(w: float, bell_choice="phi_plus") -> np.ndarray:
    """(1 - w)/4 I + w |psi><psi|, w in [-1/3, 1]."""
    if not -1 / 3 - EDGE_TOL <= w <= 1 + EDGE_TOL:
        raise ValueError(f"Werner parameter {w} outside [-1/3, 1]")
    psi = _bell(bell_choice)
    return (1 - w) / 4 * I4 + w * np.outer(psi, psi.conj())


def werner_purity(w: float) -> float:
    return (1 + 3 * w**2) / 4


def werner_boundary_parameter(mu: float) -> float:
    """Negative Werner parameter with purity mu (mu in [1/4, 1/3])."""
    return -np.sqrt((4 * mu - 1) / 3)


def rank_family(a: float, b: float, phi: float = 0.0) -> np.ndarray:
    """The rank-at-most-3 family rho(a, b, phi), coherence between |01> and |10>."""
    if not (-EDGE_TOL <= a <= 1 + EDGE_TOL) or abs(b) > 1 - a + EDGE_TOL:
        raise ValueError(f"need a in [0, 1] and |b| <= 1 - a, got a={a}, b={b}")
    # snap round-off so that b = 1 - a gives an exactly rank-deficient matrix;
    # concurrence is not Lipschitz at the rank boundary
    d0, d3 = 1 - a + b, 1 - a - b
    d0 = 0.0 if abs(d0) < EDGE_TOL else d0
    d3 = 0.0 if abs(d3) < EDGE_TOL else d3
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = d0
    rho[1, 1] = rho[2, 2] = a
    rho[1, 2] = a * np.exp(-1j * phi)
    rho[2, 1] = a * np.exp(1j * phi)
    rho[3, 3] = d3
    return 0.5 * rho


def rank_family_purity(a, b):
    return ((1 - a) ** 2 + b**2) / 2 + a**2


def rank_family_b(mu, a):
    """b >= 0 giving purity mu at the given a, or NaN when none exists."""
    b2 = 2 * (mu - np.asarray(a, dtype=float) ** 2) - (1 - np.asarray(a, dtype=float)) ** 2
    with np.errstate(invalid="ignore"):
        return np.where(b2 >= -EDGE_TOL, np.sqrt(np.clip(b2, 0, None)), np.nan)


def rank2_a(mu: float) -> float:
    """a in [1/2, 1] with a^2 + (1 - a)^2 = mu."""
    return 0.5 * (1 + np.sqrt(2 * mu - 1))


def classical_preimage(rank: str, *, w: float | None = None, a=None, b=None, rotated=False):
    """Diagonal classical states mapped onto the boundary families by the gate identities.

    ``rank="R4"`` takes ``w`` and gives diag((1-w)/4 x3, (1+3w)/4); with
    ``rotated=True`` it is conjugated by sigma_x on qubit A. ``rank="R3"``
    takes ``a, b`` and gives diag((1-a+b)/2, 0, a, (1-a-b)/2).
    """
    if rank == "R4":
        if w is None:
            raise ValueError("R4 preimage needs w")
        probs = np.array([(1 - w) / 4] * 3 + [(1 + 3 * w) / 4])
        spec = ClassicalStateSpec(probs)
        if rotated:
            spec = ClassicalStateSpec(probs, basis_a=SX)
        return spec
    if rank == "R3":
        if a is None or b is None:
            raise ValueError("R3 preimage needs a and b")
        return ClassicalStateSpec(np.array([(1 - a + b) / 2, 0.0, a, (1 - a - b) / 2]))
    raise ValueError(f"rank must be 'R4' or 'R3', got {rank!r}")


@dataclass(frozen=True)
class BoundaryPoint:
    mu: float
    delta_max: float
    branch: str  # "R4", "R3" or "R2"
    a: float = float("nan")
    b: float = float("nan")
    w: float = float("nan")


@dataclass(frozen=True)
class BoundarySearch:
    a_step: float = 1e-3
    golden_tol: float = 1e-7
    measurement: MeasurementSearch = DEFAULT_SEARCH


WERNER_BRANCH_MAX = 1 / 3


def _family_delta(mu, a_vals, search):
    a_vals = np.atleast_1d(np.asarray(a_vals, dtype=float))
    b_vals = rank_family_b(mu, a_vals)
    b_vals = np.minimum(b_vals, 1 - a_vals)
    rhos = np.stack([rank_family(a, b) for a, b in zip(a_vals, b_vals)])
    return symmetric_discord(rhos, search.measurement), b_vals


def _rank3_branch(mu: float, search: BoundarySearch):
    """Best (delta, a, b) over rho(a, b) at purity mu, b >= 0."""
    # admissible a: b^2 >= 0  <=>  3a^2 - 2a + 1 - 2 mu <= 0 ; b <= 1 - a  <=>  a^2 + (1-a)^2 >= mu
    disc = 4 - 12 * (1 - 2 * mu)
    if disc < 0:
        return None
    lo = (2 - np.sqrt(disc)) / 6
    hi = (2 + np.sqrt(disc)) / 6
    if mu > 0.5:
        lo = max(lo, rank2_a(mu))
    lo, hi = max(lo, 0.0), min(hi, 1.0)
    if hi < lo:
        return None
    grid = np.arange(lo, hi, search.a_step)
    grid = np.append(grid, hi)
    deltas, _ = _family_delta(mu, grid, search)
    k = int(np.argmax(deltas))
    left, right = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    a_best, d_best = _golden_max(lambda a: float(_family_delta(mu, a, search)[0][0]), left, right, search.golden_tol)
    if deltas[k] > d_best:
        a_best, d_best = grid[k], float(deltas[k])
    b_best = float(np.minimum(rank_family_b(mu, a_best), 1 - a_best))
    return d_best, float(a_best), b_best


def _golden_max(f, lo, hi, tol):
    g = (np.sqrt(5) - 1) / 2
    c, d = hi - g * (hi - lo), lo + g * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - g * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + g * (hi - lo)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def boundary_point(mu: float, search: BoundarySearch = BoundarySearch()) -> BoundaryPoint:
    """Maximum symmetric discord at purity ``mu``.

    For mu <= 1/3 this is the Werner state with w = -sqrt((4 mu - 1)/3). Above
    that the rho(a, b) family is searched at fixed purity, with the w > 0
    Werner state kept as a fallback candidate.
    """
    if not 0.25 - EDGE_TOL <= mu <= 1 + EDGE_TOL:
        raise ValueError(f"purity {mu} outside [1/4, 1]")
    mu = float(min(max(mu, 0.25), 1.0))
    if mu <= WERNER_BRANCH_MAX + EDGE_TOL:
        w = werner_boundary_parameter(min(mu, WERNER_BRANCH_MAX))
        d = symmetric_discord(werner(w, "phi_plus"), search.measurement)
        return BoundaryPoint(mu, max(float(d), 0.0), "R4", w=float(w))
    w = float(np.sqrt((4 * mu - 1) / 3))
    best = BoundaryPoint(mu, float(symmetric_discord(werner(w, "phi_plus"), search.measurement)), "R4", w=w)
    r3 = _rank3_branch(mu, search)
    if r3 is not None and r3[0] >= best.delta_max - 1e-12:
        d, a, b = r3
        branch = "R2" if abs(b - (1 - a)) < 1e-9 else "R3"
        best = BoundaryPoint(mu, d, branch, a=a, b=b)
    return best


def boundary_curve(mu_grid, search: BoundarySearch = BoundarySearch()) -> list[BoundaryPoint]:
    return [boundary_point(float(mu), search) for mu in mu_grid]


def delta_max(mu: float, search: BoundarySearch = BoundarySearch()) -> float:
    return boundary_point(mu, search).delta_max
