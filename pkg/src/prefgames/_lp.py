"""Thin wrapper over scipy's HiGHS linear programming backend.

Every variable must lie in a finite box; the box is what makes the problem
bounded.  The wrapper adds an optional lexicographic tie-break so that the
returned argmin does not depend on solver internals.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .exceptions import InfeasibleLPError, UnboundedLPError

_FEAS_EPS = 1e-9


@dataclass(frozen=True)
class LPResult:
    value: float
    x: np.ndarray


def _as_rows(constraints, n):
    if constraints is None:
        return np.zeros((0, n)), np.zeros(0)
    if isinstance(constraints, tuple) and len(constraints) == 2 and np.ndim(constraints[0]) == 2:
        A, b = constraints
        return np.asarray(A, float).reshape(-1, n), np.asarray(b, float).ravel()
    pairs = list(constraints)
    if not pairs:
        return np.zeros((0, n)), np.zeros(0)
    A = np.array([np.asarray(a, float).ravel() for a, _ in pairs]).reshape(-1, n)
    b = np.array([float(bi) for _, bi in pairs])
    return A, b


def _highs(c, A, b, E, f, bounds):
    res = linprog(
        c,
        A_ub=A if A.size else None,
        b_ub=b if A.size else None,
        A_eq=E if E.size else None,
        b_eq=f if E.size else None,
        bounds=bounds,
        method="highs",
    )
    if res.status == 2:
        raise InfeasibleLPError("constraints are infeasible")
    if res.status == 3:  # pragma: no cover - the box rules this out
        raise UnboundedLPError("objective is unbounded below")
    if res.status != 0:  # pragma: no cover
        raise RuntimeError(f"linprog failed: {res.message}")
    return np.asarray(res.x, float)


def lp_solve(objective, constraints=None, box=None, *, eq=None, lexicographic=True):
    """Minimise ``objective . x`` over ``{A x <= b, E x = f, lo <= x <= hi}``.

    ``constraints`` is either ``(A, b)`` or an iterable of ``(a, b)``
    halfspace pairs; ``eq`` likewise for equalities.  ``box`` is ``(lo, hi)``
    or any object with ``lo``/``hi`` attributes.  With ``lexicographic`` the
    returned argmin is the lexicographically smallest optimal point (up to a
    relative slack of 1e-9).

    Raises InfeasibleLPError / UnboundedLPError.
    """
    c = np.asarray(objective, dtype=float).ravel()
    n = c.size
    if box is None:
        raise UnboundedLPError("a finite box is required")
    lo, hi = (box.lo, box.hi) if hasattr(box, "lo") else box
    lo = np.broadcast_to(np.asarray(lo, float), (n,)).copy()
    hi = np.broadcast_to(np.asarray(hi, float), (n,)).copy()
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise UnboundedLPError("box must be finite")
    if np.any(lo > hi + _FEAS_EPS):
        raise InfeasibleLPError("empty box")
    hi = np.maximum(hi, lo)
    A, b = _as_rows(constraints, n)
    E, f = _as_rows(eq, n)
    if A.shape[1] != n or E.shape[1] != n:
        raise ValueError("constraint width does not match objective")
    bounds = list(zip(lo, hi))

    x = _highs(c, A, b, E, f, bounds)
    value = float(c @ x)
    if lexicographic:
        width = hi - lo
        scale = max(1.0, float(np.abs(c).sum() * (width.max() if n else 1.0)))
        rows, rhs = [c], [value + _FEAS_EPS * scale]
        for i in range(n):
            e = np.zeros(n)
            e[i] = 1.0
            try:
                x = _highs(e, np.vstack([A, *rows]), np.r_[b, rhs], E, f, bounds)
            except InfeasibleLPError:
                # solver tolerance ate the slack; the last stage is still optimal
                break
            rows.append(e)
            rhs.append(x[i] + _FEAS_EPS * max(1.0, width[i]))
    x = np.clip(x, lo, hi)
    # snap round-off against the box faces
    x[x - lo < 1e-10] = lo[x - lo < 1e-10]
    x[hi - x < 1e-10] = hi[hi - x < 1e-10]
    return LPResult(value=float(c @ x), x=x)
