"""Independent estimate of the CNOT-kernel discording power at fixed purity.

Maximizes symmetric discord over (p, basis angles) with SLSQP under the
explicit constraints sum p = 1, sum p^2 = mu, p >= 0, from many random
starts. Shares nothing with the staged search in discpower.power except the
discord evaluator itself.

    python scripts/cnot_gap_oracle.py 0.7 0.9
"""

import sys

import numpy as np
from scipy.optimize import minimize

from discpower.discord import MeasurementSearch, symmetric_discord
from discpower.gates import cartan_kernel
from discpower.mdms import delta_max
from discpower.states import basis_from_angles, classical_matrix

KERNEL = cartan_kernel((np.pi / 4, 0, 0))
# cheap inner search for the optimizer; the winner is re-scored with the default
INNER = MeasurementSearch(n_theta=8, n_phi=16, method="newton")


def neg_delta(x, search=INNER):
    p = np.clip(x[:4], 0, None)
    rho = classical_matrix(p, basis_from_angles(x[4], x[5]), basis_from_angles(x[6], x[7]))
    rho = KERNEL @ rho @ KERNEL.conj().T
    return -float(symmetric_discord(rho[None], search)[0])


def oracle(mu, starts=60, seed=12345):
    rng = np.random.default_rng(seed)
    cons = [
        {"type": "eq", "fun": lambda x: np.sum(x[:4]) - 1},
        {"type": "eq", "fun": lambda x: np.sum(x[:4] ** 2) - mu},
    ]
    bounds = [(0, 1)] * 4 + [(None, None)] * 4
    best = (0.0, None)
    for _ in range(starts):
        p = rng.dirichlet(np.ones(4) * 0.5)
        # push towards the purity shell before handing to SLSQP
        d = p - 0.25
        p = 0.25 + d * np.sqrt(max(mu - 0.25, 0) / max(d @ d, 1e-12))
        p = np.clip(p, 0, None)
        p /= p.sum()
        x0 = np.concatenate([p, rng.uniform(0, np.pi, 1), rng.uniform(0, 2 * np.pi, 1),
                             rng.uniform(0, np.pi, 1), rng.uniform(0, 2 * np.pi, 1)])
        res = minimize(neg_delta, x0, method="SLSQP", bounds=bounds, constraints=cons,
                       options={"maxiter": 300, "ftol": 1e-12})
        x = res.x
        if abs(np.sum(x[:4]) - 1) < 1e-6 and abs(np.sum(x[:4] ** 2) - mu) < 1e-6 and x[:4].min() > -1e-8:
            val = -neg_delta(x, MeasurementSearch())
            if val > best[0]:
                best = (val, x)
    return best


if __name__ == "__main__":
    for mu in map(float, sys.argv[1:] or ["0.7", "0.9"]):
        val, x = oracle(mu)
        dm = delta_max(mu)
        print(f"mu={mu} dp_oracle={val:.6f} delta_max={dm:.6f} gap={dm - val:.6f} p={np.round(x[:4], 4)}")
