"""Nonnegative least squares via the Lawson-Hanson active-set method.

Solves  min_x ||A x - b||_2  subject to  x >= 0.

Small and deterministic on purpose: cost inference and optimality
certificates lean on the exact active set, and the problems here are tiny
(one column per tight constraint), so a dependency-free implementation keeps
the numerics inspectable.
"""
from __future__ import annotations

import numpy as np


def nnls(A, b, tol=1e-10, max_iter=None):
    """Return ``(x, rnorm)`` minimising ``||A x - b||_2`` over ``x >= 0``.

    Parameters
    ----------
    A : (m, n) array_like
    b : (m,) array_like
    tol : float
        Dual-feasibility tolerance on the gradient ``A.T (b - A x)``.
    max_iter : int, optional
        Defaults to ``10 * n`` outer iterations, which is far beyond what
        the desk-scale problems here ever need.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if max_iter is None:
        max_iter = max(10 * n, 30)

    x = np.zeros(n)
    active = np.zeros(n, dtype=bool)  # True = in the positive (passive) set
    resid = b.copy()

    for _ in range(max_iter):
        grad = A.T @ resid
        grad[active] = -np.inf  # already in the passive set
        j = int(np.argmax(grad))
        if grad[j] <= tol:
            break  # KKT: no coordinate wants to increase
        active[j] = True

        # Inner loop: solve the unconstrained LS on the passive set and walk
        # back along the segment x -> s until the passive iterate is feasible.
        while True:
            cols = np.flatnonzero(active)
            s_passive, *_ = np.linalg.lstsq(A[:, cols], b, rcond=None)
            if np.all(s_passive > tol):
                x = np.zeros(n)
                x[cols] = s_passive
                break
            # step length limited by coordinates crossing zero
            xp = x[cols]
            neg = s_passive <= tol
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = xp[neg] / (xp[neg] - s_passive[neg])
            alpha = np.min(ratios)
            x_new = np.zeros(n)
            x_new[cols] = xp + alpha * (s_passive - xp)
            x = np.where(x_new < tol, 0.0, x_new)
            active = x > 0
            if not np.any(active):
                break
        resid = b - A @ x

    return x, float(np.linalg.norm(b - A @ x))
