"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` (the lines are repeated in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
Tolerances are the contractual ones; nothing is loosened to make a line pass.
"""

import functools
import time

import numpy as np
import pytest

from discpower.discord import MeasurementSearch, concurrence, symmetric_discord
from discpower.gates import canonical_coordinates, cartan_kernel, normalize_coordinates
from discpower.linalg import random_unitary, tensor
from discpower.mdms import boundary_curve, boundary_point, delta_max, rank_family, werner, werner_boundary_parameter
from discpower.power import PowerSearchConfig, angle_sweep, discording_power
from discpower.states import (
    ClassicalStateSpec,
    RandomStateConfig,
    make_classical,
    purity,
    sample_random_states,
)
from discpower.verification import (
    PSI_MINUS_I,
    cnot_werner_identity,
    sqrt_swap_rank3_identity,
    sqrt_swap_werner_identity,
)

PI = np.pi
REPORT = []


def record(label, passed, detail):
    line = f"{'PASS' if passed else 'FAIL'}  criterion {label}: {detail}"
    print(line)
    REPORT.append(line)
    return passed


@functools.lru_cache(maxsize=None)
def dmax(mu):
    return delta_max(mu)


@functools.lru_cache(maxsize=None)
def dp(coords, mu):
    return discording_power(coords, PowerSearchConfig(mu=mu)).dp


# -- 1. identity suite -----------------------------------------------------

W_VALUES = (-1 / 3, -0.2, 0.0, 0.5)


def test_c1a_cnot_werner():
    t0 = time.perf_counter()
    worst = max(cnot_werner_identity(w) for w in W_VALUES)
    dt = time.perf_counter() - t0
    ok = record("1(a)", worst <= 1e-10 and dt < 1, f"max Frobenius {worst:.2e} (tol 1e-10), {dt:.3f} s")
    assert ok


def test_c1b_sqrt_swap_werner():
    # as stated, with (|01> + i|10>)/sqrt2
    t0 = time.perf_counter()
    worst = max(sqrt_swap_werner_identity(w, g, "psi_i") for w in W_VALUES for g in (0, PI / 8))
    dt = time.perf_counter() - t0
    ok = record("1(b)", worst <= 1e-10 and dt < 1, f"max Frobenius {worst:.2e} (tol 1e-10) with (|01>+i|10>)/sqrt2")
    fixed = max(sqrt_swap_werner_identity(w, g, PSI_MINUS_I) for w in W_VALUES for g in (0, PI / 8))
    record("1(b) supplementary", fixed <= 1e-10, f"max Frobenius {fixed:.2e} with (|01>-i|10>)/sqrt2")
    assert ok


def test_c1c_sqrt_swap_rank3():
    t0 = time.perf_counter()
    worst = max(sqrt_swap_rank3_identity(a, b, g) for a, b in ((0.6, 0.2), (0.8, 0.2), (0.5, 0.5)) for g in (0, PI / 8))
    dt = time.perf_counter() - t0
    ok = record("1(c)", worst <= 1e-10 and dt < 1, f"max Frobenius {worst:.2e} (tol 1e-10), {dt:.3f} s")
    assert ok


# -- 2. rank-2 discord identity --------------------------------------------

A_VALUES = (0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


def test_c2_rank2_discord_equals_a():
    t0 = time.perf_counter()
    rhos = np.stack([rank_family(a, 1 - a, 0) for a in A_VALUES])
    d = symmetric_discord(rhos)
    dt = time.perf_counter() - t0
    err = np.abs(d - np.array(A_VALUES))
    detail = ", ".join(f"a={a}: {x:.4f}" for a, x in zip(A_VALUES, d))
    ok = record("2 (discord)", err.max() <= 2e-3 and dt < 10, f"max |delta - a| = {err.max():.4f} (tol 2e-3); {detail}")
    assert ok


def test_c2_rank2_concurrence_equals_a():
    c = np.array([concurrence(rank_family(a, 1 - a, 0)) for a in A_VALUES])
    err = np.abs(c - np.array(A_VALUES)).max()
    ok = record("2 (concurrence)", err <= 1e-9, f"max |C - a| = {err:.2e} (tol 1e-9)")
    assert ok


# -- 3. boundary -----------------------------------------------------------


@functools.lru_cache(maxsize=None)
def boundary40():
    t0 = time.perf_counter()
    pts = boundary_curve(np.linspace(0.25, 1, 40))
    return pts, time.perf_counter() - t0


def test_c3_boundary_continuity():
    pts, dt = boundary40()
    d = np.array([p.delta_max for p in pts])
    gaps = np.abs(np.diff(d))
    k = int(np.argmax(gaps))
    ok = record(
        "3 (continuity)",
        gaps.max() < 0.05 and dt < 120,
        f"max adjacent gap {gaps.max():.4f} (tol 0.05) between mu={pts[k].mu:.4f} and {pts[k + 1].mu:.4f}; {dt:.1f} s",
    )
    assert ok


def test_c3_boundary_endpoints():
    pts, _ = boundary40()
    first, last = pts[0], pts[-1]
    ok = record(
        "3 (endpoints)",
        abs(first.mu - 0.25) < 1e-12 and abs(first.delta_max) < 1e-9 and abs(last.mu - 1) < 1e-12
        and abs(last.delta_max - 1) < 1e-6,
        f"start ({first.mu}, {first.delta_max:.2e}), end ({last.mu}, {last.delta_max:.9f})",
    )
    assert ok


def test_c3_werner_branch():
    pts, _ = boundary40()
    werner_pts = [p for p in pts if p.mu <= 1 / 3]
    worst = 0.0
    worst_c = 0.0
    for p in werner_pts:
        rho = werner(werner_boundary_parameter(p.mu))
        worst = max(worst, abs(p.delta_max - max(symmetric_discord(rho), 0.0)))
        worst_c = max(worst_c, concurrence(rho))
    ok = record(
        "3 (Werner branch)",
        worst == 0.0 and worst_c < 1e-9 and all(p.branch == "R4" for p in werner_pts),
        f"{len(werner_pts)} points, max |delta_max - delta(werner)| = {worst:.1e}, max concurrence {worst_c:.1e}",
    )
    assert ok


def test_c3_supplementary_refined_grid():
    # not part of the criterion: the steep stretch just below mu = 1/3 comes
    # from the Werner branch itself and flattens out as the grid is refined
    gaps = []
    for n in (5, 20, 80):
        mus = np.linspace(0.3077, 1 / 3, n)
        d = np.array([boundary_point(m).delta_max for m in mus])
        gaps.append(np.abs(np.diff(d)).max())
    record("3 supplementary", gaps[-1] < 0.05, "max gap on [0.3077, 1/3] with 5/20/80 points: " + ", ".join(f"{g:.4f}" for g in gaps))
    assert gaps[0] > gaps[1] > gaps[2]


# -- 4. perfect discorder ----------------------------------------------------

MU4 = (0.3, 0.5, 0.7, 0.9, 1.0)


def test_c4_sqrt_swap_class_reaches_boundary():
    t0 = time.perf_counter()
    rows = [(mu, dp((PI / 8, PI / 8, 0.0), mu), dmax(mu)) for mu in MU4]
    dt = time.perf_counter() - t0
    short = max(d - p for _, p, d in rows)
    detail = ", ".join(f"mu={mu}: {p:.5f}/{d:.5f}" for mu, p, d in rows)
    ok = record("4", short <= 5e-3 and dt < 900, f"max shortfall {short:.2e} (tol 5e-3), DP/delta_max {detail}; {dt:.0f} s")
    assert ok


# -- 5. CNOT gap -------------------------------------------------------------


def test_c5_cnot():
    t0 = time.perf_counter()
    cnot = (PI / 4, 0.0, 0.0)
    low = [(mu, dp(cnot, mu), dmax(mu)) for mu in (0.28, 0.33)]
    pure = dp(cnot, 1.0)
    high = [(mu, dp(cnot, mu), dmax(mu)) for mu in (0.7, 0.9)]
    dt = time.perf_counter() - t0
    ok_low = all(p >= d - 5e-3 for _, p, d in low)
    ok_pure = abs(pure - 1) <= 1e-3
    ok_gap = all(d - p > 1e-2 for _, p, d in high)
    detail = "; ".join(f"mu={mu}: DP {p:.5f} vs {d:.5f}" for mu, p, d in low + [(1.0, pure, 1.0)] + high)
    ok = record("5", ok_low and ok_pure and ok_gap and dt < 900, f"{detail}; {dt:.0f} s")
    assert ok


# -- 6. angle sweep ------------------------------------------------------------

# 25 uniform points put pi/8 on the grid; 0.15 pi makes the 26th
ALPHA = np.sort(np.append(np.linspace(0, PI / 4, 25), 0.15 * PI))


def test_c6_sweep():
    t0 = time.perf_counter()
    a00 = [r.dp for _, r in angle_sweep("a00", 0.7, ALPHA)]
    aa0 = [r.dp for _, r in angle_sweep("aa0", 0.7, ALPHA)]
    dt = time.perf_counter() - t0
    arg00 = ALPHA[int(np.argmax(a00))]
    arga0 = ALPHA[int(np.argmax(aa0))]
    at_pi8 = aa0[int(np.argmin(np.abs(ALPHA - PI / 8)))]
    at_pi4 = a00[-1]
    ok = record(
        "6",
        np.isclose(arg00, PI / 4) and np.isclose(arga0, PI / 8) and at_pi8 > at_pi4 and dt < 1800,
        f"argmax a00 = {arg00 / PI:.4f} pi, argmax aa0 = {arga0 / PI:.4f} pi, "
        f"DP(pi/8,pi/8,0) = {at_pi8:.5f} > DP(pi/4,0,0) = {at_pi4:.5f}; {dt:.0f} s",
    )
    assert ok


# -- 7. property suites --------------------------------------------------------


def test_c7_zero_discord():
    rng = np.random.default_rng(7)
    specs = [
        make_classical(ClassicalStateSpec(rng.dirichlet(np.ones(4) * rng.uniform(0.1, 3)),
                                          random_unitary(2, rng), random_unitary(2, rng))).mat
        for _ in range(1000)
    ]
    d = symmetric_discord(np.stack(specs))
    ok = record("7 (zero discord)", d.max() < 1e-6, f"max delta over 1000 classical specs {d.max():.2e} (tol 1e-6)")
    assert ok


def test_c7_local_unitary_invariance():
    rng = np.random.default_rng(8)
    rhos = np.concatenate([sample_random_states(RandomStateConfig(r, 25, 80 + r)) for r in (1, 2, 3, 4)])
    locs = np.stack([tensor(random_unitary(2, rng), random_unitary(2, rng)) for _ in range(len(rhos))])
    d0 = symmetric_discord(rhos)
    d1 = symmetric_discord(locs @ rhos @ np.conj(np.swapaxes(locs, -1, -2)))
    err = np.abs(d0 - d1).max()
    ok = record("7 (local-unitary invariance)", err <= 1e-4, f"max change over 100 cases {err:.2e} (tol 1e-4)")
    assert ok


def test_c7_boundary_dominance():
    # grid-only discord can only overestimate (it minimizes over fewer
    # measurements), so it screens safely; states that come near the boundary
    # get the full search and an exact boundary value
    t0 = time.perf_counter()
    mus = np.linspace(0.25, 1, 61)
    curve = np.array([p.delta_max for p in boundary_curve(mus)])
    floor = np.minimum(curve[:-1], curve[1:])
    coarse = MeasurementSearch(8, 16, refine=False)
    worst = -np.inf
    rechecked = 0
    for rank in (1, 2, 3, 4):
        rhos = sample_random_states(RandomStateConfig(rank, 100_000, 1000 + rank))
        mu = purity(rhos)
        upper = symmetric_discord(rhos, coarse)
        cell = np.clip(np.searchsorted(mus, mu) - 1, 0, len(floor) - 1)
        close = np.flatnonzero(upper > floor[cell] - 0.02)
        rechecked += len(close)
        for i in close:
            worst = max(worst, symmetric_discord(rhos[i]) - delta_max(mu[i]))
        far = np.setdiff1d(np.arange(len(rhos)), close)
        if len(far):
            worst = max(worst, float(np.max(upper[far] - floor[cell[far]])))
    dt = time.perf_counter() - t0
    ok = record(
        "7 (boundary dominance)",
        worst <= 1e-3,
        f"max delta - delta_max over 4 x 1e5 states {worst:.4f} (tol 1e-3), {rechecked} re-checked in full; {dt:.0f} s",
    )
    assert ok


def test_c7_chamber():
    rng = np.random.default_rng(9)
    worst = 0.0
    outside = 0
    for _ in range(1000):
        c = rng.uniform(-PI, PI, 3)
        u = tensor(random_unitary(2, rng), random_unitary(2, rng)) @ cartan_kernel(c)
        u = u @ tensor(random_unitary(2, rng), random_unitary(2, rng))
        got = canonical_coordinates(u)
        outside += not got.in_chamber()
        again = canonical_coordinates(cartan_kernel(got))
        worst = max(worst, np.abs(np.subtract(again, got)).max(), np.abs(np.subtract(got, normalize_coordinates(c))).max())
    ok = record("7 (chamber)", outside == 0 and worst <= 1e-6, f"{outside} outside chamber, max re-extraction error {worst:.2e} (tol 1e-6)")
    assert ok


def test_c7_seed_determinism():
    cfg = PowerSearchConfig(mu=0.6, seed=11, budget=20_000)
    a = discording_power((0.4, 0.2, 0.1), cfg)
    b = discording_power((0.4, 0.2, 0.1), cfg)
    same = a.dp == b.dp and a.n_evals == b.n_evals and all(
        np.array_equal(x, y) for x, y in zip((a.spec.probs, a.spec.basis_a, a.spec.basis_b),
                                             (b.spec.probs, b.spec.basis_a, b.spec.basis_b))
    )
    ok = record("7 (seed determinism)", same, f"DP {a.dp!r} twice, identical achieving state: {same}")
    assert ok


# -- 8. full-scale preset ------------------------------------------------------


def test_c8_full_preset_exists():
    cfg = PowerSearchConfig.full(0.7)
    ok = record("8", cfg.budget >= 8_000_000, f"full preset budget {cfg.budget:,} (not run by default)")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
