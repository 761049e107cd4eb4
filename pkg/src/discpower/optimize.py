"""Nelder-Mead minimization run on many independent problems at once.

The objective is called as ``fun(x, idx)`` with an (M, d) array of points and
the (M,) indices of the problems they belong to, and returns M values. Each
problem follows its own simplex; a problem is frozen once its simplex
diameter (max vertex distance from the best vertex) falls below ``xtol``,
so its trajectory does not depend on what else is in the batch.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

ALPHA, GAMMA, RHO, SIGMA = 1.0, 2.0, 0.5, 0.5


class BatchResult(NamedTuple):
    x: np.ndarray  # (N, d) best points
    fun: np.ndarray  # (N,) best values
    nit: int
    converged: np.ndarray  # (N,) bool


def initial_simplex(x0: np.ndarray, step) -> np.ndarray:
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    n, d = x0.shape
    step = np.broadcast_to(np.asarray(step, dtype=float), (d,))
    simplex = np.repeat(x0[:, None, :], d + 1, axis=1)
    simplex[:, np.arange(1, d + 1), np.arange(d)] += step
    return simplex


def batched_nelder_mead(
    fun: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x0: np.ndarray,
    step=0.1,
    xtol: float = 1e-8,
    max_iter: int = 2000,
    ftol: float = 0.0,
) -> BatchResult:
    """Minimize ``fun`` from each row of ``x0`` (shape (N, d)).

    A problem stops when its simplex diameter drops below ``xtol`` or when
    the spread of its vertex values is at most ``ftol`` (flat directions).
    """
    simplex = initial_simplex(x0, step)
    n, npts, d = simplex.shape
    fvals = fun(simplex.reshape(-1, d), np.repeat(np.arange(n), npts)).reshape(n, npts)
    active = np.ones(n, dtype=bool)
    rows = np.arange(n)
    it = 0
    for it in range(1, max_iter + 1):
        order = np.argsort(fvals, axis=1, kind="stable")
        simplex = np.take_along_axis(simplex, order[:, :, None], axis=1)
        fvals = np.take_along_axis(fvals, order, axis=1)
        diam = np.max(np.abs(simplex[:, 1:] - simplex[:, :1]), axis=(1, 2))
        active &= (diam >= xtol) & (fvals[:, -1] - fvals[:, 0] > ftol)
        if not active.any():
            break
        idx = rows[active]
        s = simplex[idx]
        f = fvals[idx]
        best, worst = f[:, 0], f[:, -1]
        second = f[:, -2]
        centroid = s[:, :-1].mean(axis=1)
        xw = s[:, -1]

        xr = centroid + ALPHA * (centroid - xw)
        xe = centroid + GAMMA * (xr - centroid)
        fre = fun(np.concatenate([xr, xe]), np.concatenate([idx, idx]))
        fr, fe = fre[: len(idx)], fre[len(idx) :]
        outside = fr < worst
        xc = np.where(outside[:, None], centroid + RHO * (xr - centroid), centroid + RHO * (xw - centroid))
        fc = fun(xc, idx)

        new_x = xw.copy()
        new_f = worst.copy()

        expand = fr < best
        use_e = expand & (fe < fr)
        use_r = (expand & ~use_e) | (~expand & (fr < second))
        contract = ~expand & (fr >= second)
        accept_c = contract & np.where(outside, fc <= fr, fc < worst)
        shrink = contract & ~accept_c

        new_x[use_e], new_f[use_e] = xe[use_e], fe[use_e]
        new_x[use_r], new_f[use_r] = xr[use_r], fr[use_r]
        new_x[accept_c], new_f[accept_c] = xc[accept_c], fc[accept_c]
        s[:, -1] = new_x
        f[:, -1] = new_f

        if shrink.any():
            ss = s[shrink]
            pts = ss[:, :1] + SIGMA * (ss[:, 1:] - ss[:, :1])
            fp = fun(pts.reshape(-1, d), np.repeat(idx[shrink], d)).reshape(pts.shape[0], d)
            ss[:, 1:] = pts
            fs = f[shrink]
            fs[:, 1:] = fp
            s[shrink] = ss
            f[shrink] = fs

        simplex[idx] = s
        fvals[idx] = f

    k = np.argmin(fvals, axis=1)
    return BatchResult(simplex[rows, k], fvals[rows, k], it, ~active)
