"""Wolfe's minimum-norm-point algorithm for polytopes given by points.

Used both for Euclidean projection onto a V-polytope (shift the points by
the query) and for the canonical min-norm selection from a hull.
"""

import numpy as np


def _affine_min(S):
    """Min-norm point of the affine hull of rows of S: weights summing to 1."""
    k = S.shape[0]
    G = S @ S.T
    M = np.zeros((k + 1, k + 1))
    M[:k, :k] = G
    M[:k, k] = 1.0
    M[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
    return sol[:k]


def min_norm_point(points, tol=1e-12, max_iter=1000):
    """Return ``(x, weights)`` with ``x = weights @ points`` of least norm
    over the convex hull of the rows of ``points``."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    k = P.shape[0]
    if k == 1:
        return P[0].copy(), np.ones(1)
    scale = max(1.0, float(np.abs(P).max()))
    start = int(np.argmin(np.einsum("ij,ij->i", P, P)))
    active = [start]
    lam = np.array([1.0])
    x = P[start].copy()
    for _ in range(max_iter):
        # major cycle
        vals = P @ x
        j = int(np.argmin(vals))
        if x @ x - vals[j] <= tol * scale * scale or j in active:
            break
        active.append(j)
        lam = np.append(lam, 0.0)
        while True:
            # minor cycle
            S = P[active]
            mu = _affine_min(S)
            if np.all(mu > tol):
                lam = mu
                x = lam @ S
                break
            neg = mu <= tol
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(neg, lam / (lam - mu), np.inf)
            theta = min(1.0, float(np.min(ratios)))
            lam = lam + theta * (mu - lam)
            keep = lam > tol
            if not np.any(keep):  # pragma: no cover - numerical guard
                keep[np.argmax(lam)] = True
            active = [a for a, kp in zip(active, keep) if kp]
            lam = lam[keep]
            lam = lam / lam.sum()
            x = lam @ P[active]
    weights = np.zeros(k)
    weights[active] = lam
    return x, weights


def project_onto_hull(p, points):
    """Euclidean projection of ``p`` onto the convex hull of ``points``."""
    p = np.asarray(p, dtype=float)
    P = np.atleast_2d(np.asarray(points, dtype=float))
    x, w = min_norm_point(P - p)
    return x + p, w
