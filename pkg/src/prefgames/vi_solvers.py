"""Grid and fixed-point solvers for VI(T, C) and QVI(T, K) with
set-valued operators, plus direct verification.

A point ``x`` solves the problem when it is feasible and some ``s`` in
``T(x)`` has ``<s, y - x> >= 0`` for every feasible ``y``.  The residual
``max_{s in T(x)} min_{y} <s, y - x>`` is computed exactly: a 1-D closed
form or a small max-min LP over the hull coefficients of ``T(x)`` and the
vertices of the feasible set.  Verdicts compare ``residual / scale`` with
``-tol``, where ``scale`` is the largest generator norm, so they do not
change when the operator is multiplied by a positive constant.

Operators may return a :class:`BlockSet` (a product of compact convex
sets acting on consecutive coordinate blocks); the feasible set is then
a list of per-block regions and the residual splits blockwise.
"""

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from . import convex_geometry as cg
from ._lp import lp_solve
from ._validation import check_point, check_tol
from .exceptions import (
    InfeasibleLPError,
    MalformedProblemError,
    NonConvergenceError,
    PreconditionError,
    PropertyViolation,
    UnsupportedRegionError,
)

__all__ = [
    "BlockSet",
    "VIProblem",
    "QVIProblem",
    "SolutionCertificate",
    "GridResult",
    "verify_solution",
    "solve_vi_grid",
    "solve_qvi_grid",
    "solve_qvi_fixed_point",
    "MAX_GRID_DIM",
]

log = logging.getLogger(__name__)

MAX_GRID_DIM = 3


class BlockSet:
    """Product of compact convex sets on consecutive coordinate blocks."""

    def __init__(self, blocks):
        self.blocks = list(blocks)
        dims = [b.dim for b in self.blocks]
        self.offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)
        self.dim = int(self.offsets[-1])

    def split(self, v):
        return [v[self.offsets[i]:self.offsets[i + 1]] for i in range(len(self.blocks))]

    @property
    def scale(self):
        return max(b.scale for b in self.blocks)

    def scaled(self, factor):
        return BlockSet([b.scaled(factor) for b in self.blocks])

    def contains(self, s, tol=1e-9):
        s = check_point(s, self.dim, "dual vector")
        return all(b.contains(p, tol) for b, p in zip(self.blocks, self.split(s)))

    def min_norm_element(self):
        return np.concatenate([b.min_norm_element() for b in self.blocks])

    def to_dict(self):
        return {"blocks": [b.to_dict() for b in self.blocks]}

    def __repr__(self):
        return f"BlockSet({self.blocks!r})"


def _as_blocks(value):
    if isinstance(value, BlockSet):
        return value
    if isinstance(value, cg.CompactConvexSet):
        return BlockSet([value])
    raise MalformedProblemError(f"operator returned {type(value).__name__}, expected a compact convex set")


@dataclass
class VIProblem:
    """``operator(x)`` returns a CompactConvexSet or BlockSet; ``feasible``
    is a region, or a list of per-block regions for block operators."""

    operator: object
    feasible: object
    name: str = "vi"

    def constraint(self, x):
        return self.feasible

    @property
    def box(self):
        return _bounding_box(self.feasible)


@dataclass
class QVIProblem:
    """Like :class:`VIProblem` with a moving feasible set ``constraint(x)``
    (region or list of per-block regions) inside the box ``box``."""

    operator: object
    constraint: object
    box: object
    name: str = "qvi"


def _regions(value):
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _bounding_box(feasible):
    lo, hi = [], []
    for r in _regions(feasible):
        a, b = r.bounding_box()
        lo.append(a)
        hi.append(b)
    return cg.IntervalProduct(np.concatenate(lo), np.concatenate(hi))


@dataclass
class SolutionCertificate:
    x: np.ndarray
    multiplier: np.ndarray
    residual: float
    method: str
    verified: bool
    feasible: bool
    scale: float = 1.0
    tol: float = 1e-9
    details: dict = field(default_factory=dict)
    trace: list = None

    @property
    def relative_residual(self):
        return self.residual / self.scale

    def to_dict(self):
        d = {
            "x": self.x.tolist(),
            "multiplier": None if self.multiplier is None else self.multiplier.tolist(),
            "residual": self.residual,
            "method": self.method,
            "verified": self.verified,
            "feasible": self.feasible,
            "scale": self.scale,
            "tol": self.tol,
            "details": self.details,
        }
        if self.trace is not None:
            d["trace"] = self.trace
        return d


# ---------------------------------------------------------------------------
# residual of one block


def _feasible_vertices(region):
    if region.is_empty:
        raise MalformedProblemError("feasible set is empty")
    if isinstance(region, cg.Ball) and region.dim > 1:
        raise UnsupportedRegionError("ball-shaped feasible sets are not supported; use a polytope")
    if isinstance(region, cg.Ball):
        region = region.as_interval()
    return region.vertices()


def _block_residual_1d(T, lo, hi, x):
    """max over s in T (an interval of reals) of min(s (lo - x), s (hi - x))."""
    if T.unit_ball:
        gmin, gmax = -T.radius, T.radius
    else:
        g = T.generators[:, 0]
        gmin, gmax = float(g.min()), float(g.max())
    cands = [gmin, gmax] + ([0.0] if gmin <= 0.0 <= gmax else [])
    best_s, best = None, -np.inf
    for s in cands:
        val = min(s * (lo - x), s * (hi - x))
        if val > best:
            best_s, best = s, val
    return best, np.array([best_s])


def _block_residual(T, region, x, screen_below=None):
    """Exact ``max_{s in T} min_{y in region} <s, y - x>`` and a maximiser.

    With ``screen_below`` the cheap upper bound ``min_v max_g <g, v - x>``
    is tried first; when it is already below the threshold the bound is
    returned with no maximiser.
    """
    n = T.dim
    if n == 1:
        r = region.as_interval() if isinstance(region, cg.Ball) else region
        if r.is_empty:
            raise MalformedProblemError("feasible set is empty")
        lo, hi = r.bounding_box()
        return _block_residual_1d(T, float(lo[0]), float(hi[0]), float(x[0]))
    V = _feasible_vertices(region)
    D = V - x
    if T.unit_ball:
        # 0 is available; the value is positive only for infeasible x
        if region.contains(x, 1e-12):
            return 0.0, np.zeros(n)
        d = cg.project(x, region) - x
        s = T.radius * d / float(np.linalg.norm(d))
        return float(np.min(D @ s)), s
    G = T.generators
    k = G.shape[0]
    if k == 1:
        return float(np.min(D @ G[0])), G[0].copy()
    M = D @ G.T  # (m, k)
    if screen_below is not None:
        ub = float(np.min(np.max(M, axis=1)))
        if ub < screen_below:
            return ub, None
    # variables (lambda_1..k, tau); maximise tau with tau <= sum_j lambda_j <G_j, v_i - x>
    bound = float(np.abs(M).max()) + 1.0
    A = np.hstack([-M, np.ones((M.shape[0], 1))])
    eq = (np.r_[np.ones(k), 0.0][None, :], np.array([1.0]))
    c = np.r_[np.zeros(k), -1.0]
    res = lp_solve(c, (A, np.zeros(M.shape[0])), (np.r_[np.zeros(k), -bound], np.r_[np.ones(k), bound]), eq=eq)
    s = res.x[:k] @ G
    return float(np.min(D @ s)), s


def _residual(value, regions, x, screen=None):
    blocks = _as_blocks(value)
    regions = _regions(regions)
    if len(regions) != len(blocks.blocks):
        raise MalformedProblemError("the feasible set needs one region per operator block")
    total, parts = 0.0, []
    for T, R, xb in zip(blocks.blocks, regions, blocks.split(x)):
        if T.dim != R.dim:
            raise MalformedProblemError("block dimensions of operator and feasible set differ")
        val, s = _block_residual(T, R, xb, screen)
        total += val
        if s is None:
            return total, None, blocks
        parts.append(s)
    return total, np.concatenate(parts), blocks


def _feasible(regions, x, tol, offsets):
    for i, R in enumerate(_regions(regions)):
        xb = x[offsets[i]:offsets[i + 1]]
        if R.is_empty or not R.contains(xb, tol):
            return False
    return True


def _scale(blocks):
    sc = blocks.scale
    return float(sc) if sc > 0 else 1.0


def _certify(value, regions, x, tol, method, screen=False):
    blocks = _as_blocks(value)
    scale = _scale(blocks)
    feas = _feasible(regions, x, tol, blocks.offsets)
    if screen and not feas:
        return SolutionCertificate(x.copy(), None, -np.inf, method, False, False, scale, tol)
    # for a feasible x every block value is <= 0, so one block below -tol * scale settles it
    val, s, _ = _residual(blocks, regions, x, -tol * scale if screen else None)
    if s is None:
        return SolutionCertificate(x.copy(), None, float(val), method, False, feas, scale, tol,
                                   details={"screened": True})
    inside = blocks.contains(s, 1e-9)
    ok = bool(feas and inside and val / scale >= -tol)
    return SolutionCertificate(x.copy(), s, float(val), method, ok, feas, scale, tol)


def _witness(blocks, regions, x, s):
    """Feasible point ``y`` minimising ``<s, y - x>`` and the direction ``y - x``."""
    ys = []
    for R, sb, xb in zip(_regions(regions), blocks.split(s), blocks.split(x)):
        V = _feasible_vertices(R)
        ys.append(V[int(np.argmin((V - xb) @ sb))])
    y = np.concatenate(ys)
    return {"witness_point": y.tolist(), "witness_direction": (y - x).tolist()}


def verify_solution(prob, x_bar, tol=1e-9, multiplier=None):
    """Check ``x_bar`` against the VI/QVI definition.

    The multiplier is re-derived unless given; a given multiplier is only
    accepted when it lies in ``T(x_bar)``.  Never raises on a negative
    verdict; raises MalformedProblemError for malformed operator values.
    """
    tol = check_tol(tol)
    x = check_point(x_bar, name="x_bar")
    value = prob.operator(x)
    regions = prob.constraint(x)
    blocks = _as_blocks(value)
    if any(not b.unit_ball and b.generators.shape[0] == 0 for b in blocks.blocks):
        raise MalformedProblemError("operator value has no generators")
    if multiplier is None:
        cert = _certify(value, regions, x, tol, "verify")
        if not cert.verified and cert.multiplier is not None:
            cert.details.update(_witness(blocks, regions, x, cert.multiplier))
        return cert
    s = check_point(multiplier, blocks.dim, "multiplier")
    val = 0.0
    for R, sb, xb in zip(_regions(regions), blocks.split(s), blocks.split(x)):
        V = _feasible_vertices(R)
        val += float(np.min((V - xb) @ sb))
    scale = _scale(blocks)
    feas = _feasible(regions, x, tol, blocks.offsets)
    ok = bool(feas and blocks.contains(s, 1e-9) and val / scale >= -tol)
    return SolutionCertificate(x.copy(), s, val, "verify", ok, feas, float(scale), tol)


# ---------------------------------------------------------------------------
# grid solvers


@dataclass
class GridResult:
    """Verified certificates in lexicographic order, plus the grid points
    where the operator reported a property violation."""

    certificates: list
    skipped: list
    grid: int
    tol: float

    def __iter__(self):
        return iter(self.certificates)

    def __len__(self):
        return len(self.certificates)

    def __getitem__(self, i):
        return self.certificates[i]

    @property
    def points(self):
        return [c.x for c in self.certificates]


def _grid_points(box, grid):
    axes = [np.linspace(l, h, grid) if h > l else np.array([l]) for l, h in zip(box.lo, box.hi)]
    for pt in itertools.product(*axes):
        yield np.array(pt)


def _solve_grid(operator, constraint, box, grid, tol, method, max_count=None, scale=1.0):
    if box.dim > MAX_GRID_DIM:
        raise PreconditionError(f"grid solvers support dimension <= {MAX_GRID_DIM}, got {box.dim}")
    grid = int(grid)
    if grid < 2:
        raise PreconditionError("grid needs at least two points per axis")
    tol = check_tol(tol)
    certs, skipped = [], []
    for x in _grid_points(box, grid):
        regions = constraint(x)
        if any(R.is_empty for R in _regions(regions)):
            continue
        try:
            value = operator(x)
        except PropertyViolation as exc:
            skipped.append({"x": x.tolist(), "reason": str(exc)})
            continue
        if scale != 1.0:
            value = value.scaled(scale)
        cert = _certify(value, regions, x, tol, method, screen=True)
        if cert.verified:
            certs.append(cert)
            if max_count is not None and len(certs) >= max_count:
                break
    if skipped:
        log.info("%d grid points skipped after property violations", len(skipped))
    return GridResult(certs, skipped, grid, tol)


def solve_vi_grid(prob, grid=101, tol=1e-9, max_count=None, scale=1.0):
    """All verified grid points of the VI (feasible set's bounding box grid).

    ``scale`` multiplies every operator value; verdicts do not depend on it.
    """
    return _solve_grid(prob.operator, prob.constraint, prob.box, grid, tol, "grid", max_count, scale)


def solve_qvi_grid(prob, grid=101, tol=1e-9, max_count=None, scale=1.0):
    """All verified grid points of the QVI over ``prob.box``."""
    return _solve_grid(prob.operator, prob.constraint, prob.box, grid, tol, "grid", max_count, scale)


# ---------------------------------------------------------------------------
# fixed-point iteration


def _select(value, rule):
    blocks = _as_blocks(value)
    if rule == "min-norm":
        return blocks.min_norm_element()
    if isinstance(rule, int) or (isinstance(rule, str) and rule.startswith("generator")):
        idx = rule if isinstance(rule, int) else int(rule.split(":")[1]) if ":" in rule else 0
        parts = []
        for b in blocks.blocks:
            if b.unit_ball:
                parts.append(np.zeros(b.dim))
            else:
                parts.append(b.generators[min(idx, b.generators.shape[0] - 1)])
        return np.concatenate(parts)
    raise ValueError(f"unknown selection rule {rule!r}")


def _project(x, regions, offsets):
    parts = []
    for i, R in enumerate(_regions(regions)):
        parts.append(cg.project(x[offsets[i]:offsets[i + 1]], R))
    return np.concatenate(parts)


def _ulp_neighbours(xs):
    """``xs`` and its one-ulp neighbours per coordinate (3^n points)."""
    if xs.size > 4:
        return [xs]
    opts = [(v, np.nextafter(v, -np.inf), np.nextafter(v, np.inf)) for v in xs]
    return [np.array(c) for c in itertools.product(*opts)]


def _snap(prob, x, tol, radius):
    """Round ``x`` to few decimals when the rounded point (or a float one
    ulp away from it) verifies."""
    for d in range(1, 13):
        xs = np.round(x, d) + 0.0
        if np.linalg.norm(xs - x) > radius:
            continue
        for cand in _ulp_neighbours(xs):
            try:
                cert = verify_solution(prob, np.clip(cand, prob.box.lo, prob.box.hi), tol)
            except (PropertyViolation, MalformedProblemError, InfeasibleLPError):
                continue
            if cert.verified:
                return cert
    return None


def solve_qvi_fixed_point(prob, x0, tau=0.1, max_iters=5000, selection="min-norm", tol=1e-9,
                          step_tol=1e-8, patience=10, snap_radius=1e-6, trace=False):
    """Iterate ``x <- proj_{K(x)}(x - tau s)`` with ``s`` selected from ``T(x)``.

    ``tau`` halves after 5 sign flips of the step.  Converges when the
    step stays below ``step_tol`` for ``patience`` iterations; the limit is
    then verified directly (after an optional snap to few decimals), so
    ``verified`` is never set without the certificate check passing.

    Raises NonConvergenceError (carrying the trace) after ``max_iters``.
    """
    x = check_point(x0, prob.box.dim, "x0")
    x = np.clip(x, prob.box.lo, prob.box.hi)
    steps = []
    prev = None
    flips = 0
    quiet = 0
    offsets = None
    for it in range(int(max_iters)):
        value = prob.operator(x)
        blocks = _as_blocks(value)
        offsets = blocks.offsets
        s = _select(value, selection)
        regions = prob.constraint(x)
        x_new = _project(x - tau * s, regions, offsets)
        dx = x_new - x
        if trace:
            steps.append({"iter": it, "x": x.tolist(), "s": s.tolist(), "tau": tau})
        if prev is not None and float(dx @ prev) < 0:
            flips += 1
            if flips >= 5:
                tau *= 0.5
                flips = 0
        if np.linalg.norm(dx) > 0:
            prev = dx
        quiet = quiet + 1 if np.linalg.norm(dx) <= step_tol else 0
        x = x_new
        if quiet >= patience:
            cert = _snap(prob, x, tol, snap_radius) if snap_radius > 0 else None
            if cert is None:
                cert = verify_solution(prob, x, tol)
            cert.method = "fixed-point"
            cert.details = {"iterations": it + 1, "tau": tau, "converged_at": x.tolist()}
            cert.trace = steps if trace else None
            return cert
    raise NonConvergenceError(f"no convergence within {max_iters} iterations (last x = {x.tolist()})",
                              trace=steps if trace else [{"x": x.tolist(), "tau": tau}])
