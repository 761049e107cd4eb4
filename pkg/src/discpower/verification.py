"""Machine-precision gate identities and quick property checks.

Each check returns a :class:`Check`; ``run_all`` drives the ``verify`` CLI.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from . import discord as dis
from .gates import canonical_coordinates, cartan_kernel, named_gate, normalize_coordinates
from .linalg import frobenius_distance, random_unitary, tensor
from .mdms import classical_preimage, rank_family, werner
from .states import ClassicalStateSpec, basis_from_angles, make_classical

IDENTITY_TOL = 1e-10
PI = np.pi


class Check(NamedTuple):
    name: str
    passed: bool
    value: float
    tol: float


def _evolve(coords, rho):
    u = cartan_kernel(coords)
    return u @ rho @ u.conj().T


def cnot_werner_identity(w: float) -> float:
    """Distance between U_c(pi/4,0,0) rho_cl^R4 U_c^dag and the Werner state on (|00>+i|11>)/sqrt2."""
    cl = make_classical(classical_preimage("R4", w=w)).mat
    return frobenius_distance(_evolve((PI / 4, 0, 0), cl), werner(w, "phi_i"))


def sqrt_swap_werner_identity(w: float, gamma: float, bell="psi_i") -> float:
    """Distance between U_c(pi/8,pi/8,gamma) applied to the sigma_x-rotated R4 preimage and a Werner state."""
    cl = make_classical(classical_preimage("R4", w=w, rotated=True)).mat
    return frobenius_distance(_evolve((PI / 8, PI / 8, gamma), cl), werner(w, bell))


def sqrt_swap_rank3_identity(a: float, b: float, gamma: float = 0.0) -> float:
    cl = make_classical(classical_preimage("R3", a=a, b=b)).mat
    return frobenius_distance(_evolve((PI / 8, PI / 8, gamma), cl), rank_family(a, b, PI / 2))


# (|01> - i|10>)/sqrt2 is the image of |01> under U_c(pi/8, pi/8, gamma) with
# sigma_j (x) sigma_j ordered qubit A first
PSI_MINUS_I = np.array([0, 1, -1j, 0]) / np.sqrt(2)


def identity_checks() -> list[Check]:
    out = []
    for w in (-1 / 3, -0.2, 0.0, 0.5):
        out.append(Check(f"CNOT kernel maps R4 preimage to Werner, w={w:+.4f}", *_tol(cnot_werner_identity(w))))
        for g in (0.0, PI / 8):
            d = sqrt_swap_werner_identity(w, g, PSI_MINUS_I)
            out.append(Check(f"U_c(pi/8,pi/8,{g:.4f}) maps rotated R4 preimage to Werner, w={w:+.4f}", *_tol(d)))
    for a, b in ((0.6, 0.2), (0.8, 0.2), (0.5, 0.5)):
        for g in (0.0, 0.3, PI / 8):
            d = sqrt_swap_rank3_identity(a, b, g)
            out.append(Check(f"U_c(pi/8,pi/8,{g:.4f}) maps R3 preimage to rho({a},{b},pi/2)", *_tol(d)))
    for name, coords in (("cnot", (PI / 4, 0, 0)), ("sqrt_swap", (PI / 8,) * 3), ("identity", (0, 0, 0))):
        d = float(np.max(np.abs(np.subtract(named_gate(name).coords, coords))))
        out.append(Check(f"canonical coordinates of {name}", d <= 1e-9, d, 1e-9))
    return out


def _tol(d, tol=IDENTITY_TOL):
    return d <= tol, float(d), tol


def property_checks(seed: int = 2024, n: int = 50) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    worst = 0.0
    for _ in range(n):
        p = rng.dirichlet(np.ones(4))
        spec = ClassicalStateSpec(p, random_unitary(2, rng), random_unitary(2, rng))
        worst = max(worst, dis.discord(make_classical(spec)).symmetric)
    out.append(Check(f"zero discord of {n} random classical states", worst < 1e-6, worst, 1e-6))

    bell = werner(1.0)
    d = abs(dis.discord(bell).symmetric - 1.0)
    out.append(Check("Bell state discord is 1", d <= 1e-6, d, 1e-6))

    worst = 0.0
    for a in (0.5, 0.6, 0.7, 0.8, 0.9, 1.0):
        worst = max(worst, abs(dis.concurrence(rank_family(a, 1 - a)) - a))
    out.append(Check("concurrence of rho(a,1-a,0) equals a", worst <= 1e-9, worst, 1e-9))

    worst_chamber = 0.0
    worst_inv = 0.0
    for _ in range(n):
        c = rng.uniform(-1, 1, 3) * PI
        ks = [random_unitary(2, rng) for _ in range(4)]
        u = tensor(ks[0], ks[1]) @ cartan_kernel(c) @ tensor(ks[2], ks[3])
        got = canonical_coordinates(u)
        worst_chamber = max(worst_chamber, 0.0 if got.in_chamber() else 1.0)
        worst_inv = max(worst_inv, float(np.max(np.abs(np.subtract(got, normalize_coordinates(c))))))
    out.append(Check("canonical coordinates lie in the Weyl chamber", worst_chamber == 0, worst_chamber, 0.0))
    out.append(Check("canonical coordinates ignore local factors", worst_inv <= 1e-6, worst_inv, 1e-6))
    return out


def run_all(report: Callable[[Check], None] | None = None) -> bool:
    ok = True
    for chk in identity_checks() + property_checks():
        ok &= chk.passed
        if report:
            report(chk)
    return ok


def random_classical_spec(rng: np.random.Generator) -> ClassicalStateSpec:
    p = rng.dirichlet(np.ones(4))
    return ClassicalStateSpec(
        p,
        basis_from_angles(rng.uniform(0, PI), rng.uniform(0, 2 * PI)),
        basis_from_angles(rng.uniform(0, PI), rng.uniform(0, 2 * PI)),
    )
