"""Convex primitives at desk scale (dimension <= 8).

Regions come in five kinds: :class:`Empty`, :class:`IntervalProduct`,
:class:`HPolytope`, :class:`VPolytope` and :class:`Ball`.  Faces may be
strict (open); membership honours strictness exactly, while support
functions, polar cones and projections work with the closure.

Membership at tolerance ``tol``: a closed face is satisfied when its slack
is ``>= -tol``, a strict face when its slack is ``> tol``.
"""

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import nnls
from scipy.spatial import ConvexHull

from ._lp import LPResult, lp_solve
from ._minnorm import min_norm_point, project_onto_hull
from ._validation import MAX_DIM, check_point, check_same_dim, check_tol
from .exceptions import (
    DimensionMismatchError,
    EmptyRegionError,
    InfeasibleLPError,
    UnsupportedRegionError,
)

__all__ = [
    "ConvexRegion",
    "Empty",
    "IntervalProduct",
    "HPolytope",
    "VPolytope",
    "Ball",
    "Cone",
    "CompactConvexSet",
    "Disjointness",
    "LPResult",
    "interval",
    "hpolytope",
    "ball",
    "membership",
    "support",
    "normal_cone_at",
    "project",
    "regions_disjoint",
    "relative_overlap",
    "disjointness",
    "lp_solve",
    "ball_inside",
    "inner_radius",
    "inner_radii",
    "region_from_dict",
]

_GEN_TOL = 1e-12
_MAX_COMBINATIONS = 200_000


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _fmt(a):
    return np.array2string(np.asarray(a), precision=6, separator=", ")


class ConvexRegion:
    """Base class.  Subclasses are immutable after construction."""

    kind = "abstract"
    is_polyhedral = False

    @property
    def is_empty(self):
        return False

    def contains(self, p, tol=0.0):
        raise NotImplementedError

    def support(self, d):
        raise NotImplementedError

    def contains_many(self, points, tol=0.0):
        """Vectorised membership for the rows of ``points``."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.array([self.contains(p, tol) for p in pts], dtype=bool)

    def bounding_box(self):
        raise NotImplementedError

    def sample(self, n=16, rng=None):
        raise NotImplementedError

    def halfspaces(self):
        """``(A, b, strict)`` with unit-norm rows; polyhedral kinds only."""
        raise UnsupportedRegionError(f"{self.kind} has no halfspace form")

    def vertices(self):
        raise UnsupportedRegionError(f"{self.kind} has no vertex form")

    def to_dict(self):
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, ConvexRegion) and _canon(self.to_dict()) == _canon(other.to_dict())

    def __hash__(self):
        return hash(repr(_canon(self.to_dict())))


def _canon(obj):
    if isinstance(obj, dict):
        return tuple(sorted((k, _canon(v)) for k, v in obj.items()))
    if isinstance(obj, (list, tuple)):
        return tuple(_canon(v) for v in obj)
    if isinstance(obj, float):
        return round(obj, 12)
    return obj


class Empty(ConvexRegion):
    kind = "empty"
    is_polyhedral = True

    def __init__(self, dim):
        self.dim = int(dim)

    @property
    def is_empty(self):
        return True

    def contains(self, p, tol=0.0):
        check_point(p, self.dim)
        return False

    def support(self, d):
        check_point(d, self.dim, "direction")
        return -math.inf

    def contains_many(self, points, tol=0.0):
        return np.zeros(np.atleast_2d(points).shape[0], dtype=bool)

    def bounding_box(self):
        raise EmptyRegionError("empty region has no bounding box")

    def sample(self, n=16, rng=None):
        return np.zeros((0, self.dim))

    def vertices(self):
        return np.zeros((0, self.dim))

    def to_dict(self):
        return {"kind": "empty", "dim": self.dim}

    def __repr__(self):
        return f"Empty(dim={self.dim})"


class IntervalProduct(ConvexRegion):
    """Product of intervals; each endpoint may be open."""

    kind = "interval"
    is_polyhedral = True

    def __init__(self, lo, hi, lo_open=None, hi_open=None):
        lo, hi, lo_open, hi_open = _interval_arrays(lo, hi, lo_open, hi_open)
        if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
            raise ValueError("interval bounds must be finite")
        if (lo > hi).any() or ((lo == hi) & (lo_open | hi_open)).any():
            raise EmptyRegionError("interval is empty; use interval() to normalise")
        self._set(lo, hi, lo_open, hi_open)

    def _set(self, lo, hi, lo_open, hi_open):
        for a in (lo, hi, lo_open, hi_open):
            a.setflags(write=False)
        self.lo, self.hi, self.lo_open, self.hi_open = lo, hi, lo_open, hi_open
        self.dim = lo.size

    def contains(self, p, tol=0.0):
        p = np.asarray(p, dtype=float).reshape(-1)
        if p.size != self.dim:
            p = check_point(p, self.dim)
        lo_slack = p - self.lo
        hi_slack = self.hi - p
        ok_lo = np.where(self.lo_open, lo_slack > tol, lo_slack >= -tol)
        ok_hi = np.where(self.hi_open, hi_slack > tol, hi_slack >= -tol)
        return bool(np.all(ok_lo) and np.all(ok_hi))

    def contains_many(self, points, tol=0.0):
        P = np.asarray(points, dtype=float).reshape(-1, self.dim)
        lo_slack = P - self.lo
        hi_slack = self.hi - P
        ok_lo = np.where(self.lo_open, lo_slack > tol, lo_slack >= -tol)
        ok_hi = np.where(self.hi_open, hi_slack > tol, hi_slack >= -tol)
        return np.all(ok_lo & ok_hi, axis=1)

    def support(self, d):
        d = check_point(d, self.dim, "direction")
        return float(np.sum(np.maximum(d * self.lo, d * self.hi)))

    def bounding_box(self):
        return self.lo.copy(), self.hi.copy()

    def halfspaces(self):
        n = self.dim
        eye = np.eye(n)
        A = np.vstack([eye, -eye])
        b = np.concatenate([self.hi, -self.lo])
        strict = np.concatenate([self.hi_open, self.lo_open])
        return A, b, strict

    @cached_property
    def _vertices(self):
        axes = [np.unique([l, h]) for l, h in zip(self.lo, self.hi)]
        return _frozen(np.array(list(itertools.product(*axes))))

    def vertices(self):
        return self._vertices

    def sample(self, n=16, rng=None):
        k = max(2, int(round(n ** (1.0 / self.dim)))) + 1
        axes = [np.linspace(l, h, k) if h > l else np.array([l]) for l, h in zip(self.lo, self.hi)]
        pts = np.array(list(itertools.product(*axes)))
        if rng is not None:
            pts = np.vstack([pts, rng.uniform(self.lo, self.hi, size=(n, self.dim))])
        keep = [self.contains(p) for p in pts]
        return pts[np.array(keep, dtype=bool)]

    def to_dict(self):
        return {
            "kind": "interval",
            "lo": self.lo.tolist(),
            "hi": self.hi.tolist(),
            "lo_open": self.lo_open.tolist(),
            "hi_open": self.hi_open.tolist(),
        }

    def __repr__(self):
        if self.dim == 1:
            left = "(" if self.lo_open[0] else "["
            right = ")" if self.hi_open[0] else "]"
            return f"Interval{left}{self.lo[0]:.12g}, {self.hi[0]:.12g}{right}"
        return f"IntervalProduct(lo={_fmt(self.lo)}, hi={_fmt(self.hi)}, lo_open={self.lo_open.tolist()}, hi_open={self.hi_open.tolist()})"


def _interval_arrays(lo, hi, lo_open, hi_open):
    lo = np.array(lo, dtype=float, ndmin=1)
    hi = np.array(hi, dtype=float, ndmin=1)
    if lo.shape != hi.shape or lo.ndim != 1:
        raise DimensionMismatchError("lo and hi must be vectors of equal length")
    n = lo.size
    lo_open = np.zeros(n, bool) if lo_open is None else np.array(lo_open, dtype=bool, ndmin=1)
    hi_open = np.zeros(n, bool) if hi_open is None else np.array(hi_open, dtype=bool, ndmin=1)
    if lo_open.size != n:
        lo_open = np.full(n, bool(lo_open[0]))
    if hi_open.size != n:
        hi_open = np.full(n, bool(hi_open[0]))
    return lo, hi, lo_open, hi_open


def interval(lo, hi, lo_open=False, hi_open=False):
    """Build an :class:`IntervalProduct`, returning :class:`Empty` if empty."""
    lo, hi, lo_open, hi_open = _interval_arrays(lo, hi, lo_open, hi_open)
    if (lo > hi).any() or ((lo == hi) & (lo_open | hi_open)).any():
        return Empty(lo.size)
    if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
        raise ValueError("interval bounds must be finite")
    out = IntervalProduct.__new__(IntervalProduct)
    out._set(lo, hi, lo_open, hi_open)
    return out


def _normalise_rows(A, b):
    norms = np.linalg.norm(A, axis=1)
    return A / norms[:, None], b / norms, norms


def _enumerate_vertices(A, b, tol=1e-9):
    """Vertices of the bounded polyhedron {A x <= b} by basis enumeration."""
    m, n = A.shape
    if n == 1:
        a = A[:, 0]
        upper = np.min(b[a > 0] / a[a > 0]) if np.any(a > 0) else math.inf
        lower = np.max(b[a < 0] / a[a < 0]) if np.any(a < 0) else -math.inf
        if lower > upper + tol or not (math.isfinite(lower) and math.isfinite(upper)):
            return np.zeros((0, 1))
        if np.any(b[a == 0] < -tol):
            return np.zeros((0, 1))
        return np.unique(np.array([[lower], [upper]]), axis=0)
    if math.comb(m, n) > _MAX_COMBINATIONS:
        raise UnsupportedRegionError(f"vertex enumeration over C({m},{n}) bases is too large")
    found = []
    for rows in itertools.combinations(range(m), n):
        sub = A[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        v = np.linalg.solve(sub, b[list(rows)])
        if np.all(A @ v <= b + tol * max(1.0, float(np.abs(v).max()))):
            found.append(v)
    if not found:
        return np.zeros((0, n))
    V = np.array(found)
    V = V[np.lexsort(V.T[::-1])]
    keep = [0]
    for i in range(1, len(V)):
        if np.all(np.linalg.norm(V[keep] - V[i], axis=1) > 1e-9):
            keep.append(i)
    return V[keep] + 0.0


class HPolytope(ConvexRegion):
    """Bounded polytope ``{x : A x <= b}``; row ``i`` strict when ``strict[i]``."""

    kind = "hpolytope"
    is_polyhedral = True

    def __init__(self, A, b, strict=None):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        if A.shape[0] != b.size:
            raise DimensionMismatchError("A and b disagree on the number of rows")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("halfspace data must be finite")
        strict = np.zeros(b.size, bool) if strict is None else np.broadcast_to(np.asarray(strict, bool), (b.size,))
        norms = np.linalg.norm(A, axis=1)
        zero = norms < 1e-14
        if np.any(zero & ((b < 0) | (strict & (b <= 0)))):
            raise EmptyRegionError("a degenerate row is infeasible")
        A, b, strict = A[~zero], b[~zero], np.array(strict)[~zero]
        A, b, _ = _normalise_rows(A, b)
        self.A, self.b = _frozen(A), _frozen(b)
        self.strict = np.array(strict, dtype=bool)
        self.strict.setflags(write=False)
        self.dim = A.shape[1]
        if self.dim > MAX_DIM:
            raise UnsupportedRegionError(f"dimension {self.dim} exceeds {MAX_DIM}")
        self._check_bounded()
        if self._vertices.shape[0] == 0:
            raise EmptyRegionError("polytope closure is empty; use hpolytope() to normalise")

    def _check_bounded(self):
        n = self.dim
        for i in range(n):
            for sign in (1.0, -1.0):
                c = np.zeros(n)
                c[i] = -sign
                res = lp_solve(c, (self.A, np.zeros(len(self.b))), (-np.ones(n), np.ones(n)), lexicographic=False)
                if -res.value > 1e-9:
                    raise UnsupportedRegionError("halfspace system is unbounded")

    @cached_property
    def _vertices(self):
        return _frozen(_enumerate_vertices(self.A, self.b))

    def vertices(self):
        return self._vertices

    def halfspaces(self):
        return self.A, self.b, self.strict

    def contains(self, p, tol=0.0):
        p = check_point(p, self.dim)
        slack = self.b - self.A @ p
        return bool(np.all(np.where(self.strict, slack > tol, slack >= -tol)))

    def contains_many(self, points, tol=0.0):
        P = np.asarray(points, dtype=float).reshape(-1, self.dim)
        slack = self.b - P @ self.A.T
        return np.all(np.where(self.strict, slack > tol, slack >= -tol), axis=1)

    def support(self, d):
        d = check_point(d, self.dim, "direction")
        lo, hi = self.bounding_box()
        pad = 1e-6 * (1.0 + np.abs(hi - lo))
        res = lp_solve(-d, (self.A, self.b), (lo - pad, hi + pad), lexicographic=False)
        return -res.value

    def bounding_box(self):
        V = self._vertices
        return V.min(axis=0), V.max(axis=0)

    def sample(self, n=16, rng=None):
        return _sample_polytope(self, n, rng)

    def to_dict(self):
        return {"kind": "hpolytope", "A": self.A.tolist(), "b": self.b.tolist(), "strict": self.strict.tolist()}

    def __repr__(self):
        return f"HPolytope(A={_fmt(self.A)}, b={_fmt(self.b)}, strict={self.strict.tolist()})"


def _strict_margin(A, b, strict, box):
    """Largest t with strict rows holding at slack t; None if closure empty."""
    n = A.shape[1]
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_t = np.hstack([A, strict.astype(float)[:, None]])
    lo, hi = box
    try:
        res = lp_solve(c, (A_t, b), (np.append(lo, 0.0), np.append(hi, 1.0)), lexicographic=False)
    except InfeasibleLPError:
        return None
    return -res.value


def hpolytope(A, b, strict=None):
    """Build an :class:`HPolytope`, returning :class:`Empty` when empty."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    try:
        P = HPolytope(A, b, strict)
    except EmptyRegionError:
        return Empty(A.shape[1])
    if np.any(P.strict):
        lo, hi = P.bounding_box()
        t = _strict_margin(P.A, P.b, P.strict, (lo - 1e-9, hi + 1e-9))
        if t is None or t <= 1e-12:
            return Empty(P.dim)
    return P


class VPolytope(ConvexRegion):
    """Closed convex hull of finitely many points."""

    kind = "vpolytope"
    is_polyhedral = True

    def __init__(self, points):
        V = np.atleast_2d(np.asarray(points, dtype=float))
        if V.shape[0] == 0:
            raise EmptyRegionError("VPolytope needs at least one point")
        if not np.all(np.isfinite(V)):
            raise ValueError("vertices must be finite")
        self.dim = V.shape[1]
        if self.dim > MAX_DIM:
            raise UnsupportedRegionError(f"dimension {self.dim} exceeds {MAX_DIM}")
        self._verts = _frozen(_prune_hull(V))

    def vertices(self):
        return self._verts

    def contains(self, p, tol=0.0):
        p = check_point(p, self.dim)
        q, _ = project_onto_hull(p, self._verts)
        return bool(np.linalg.norm(q - p) <= max(tol, 1e-12))

    def support(self, d):
        d = check_point(d, self.dim, "direction")
        return float(np.max(self._verts @ d))

    def bounding_box(self):
        return self._verts.min(axis=0), self._verts.max(axis=0)

    def sample(self, n=16, rng=None):
        return _sample_polytope(self, n, rng)

    @cached_property
    def _hrep(self):
        if self.dim == 1:
            lo, hi = self.bounding_box()
            return IntervalProduct(lo, hi).halfspaces()
        V = self._verts
        if V.shape[0] <= self.dim or np.linalg.matrix_rank(V[1:] - V[0], tol=1e-10) < self.dim:
            return None  # flat: no interior
        hull = ConvexHull(V)
        A, b, _ = _normalise_rows(hull.equations[:, :-1], -hull.equations[:, -1])
        A, idx = np.unique(np.round(A, 12), axis=0, return_index=True)
        return A, b[idx], np.zeros(len(idx), bool)

    def halfspaces(self):
        """Closed facet rows; raises for lower-dimensional hulls."""
        h = self._hrep
        if h is None:
            raise UnsupportedRegionError("flat VPolytope has no full-dimensional facet form")
        return h

    def to_dict(self):
        return {"kind": "vpolytope", "vertices": self._verts.tolist()}

    def __repr__(self):
        return f"VPolytope({_fmt(self._verts)})"


def _in_hull(p, V, tol=1e-9):
    """Is ``p`` within ``tol`` (Euclidean) of conv(rows of V)?"""
    p = np.asarray(p, float)
    if V.shape[1] == 1:
        return bool(V.min() - tol <= p[0] <= V.max() + tol)
    q, _ = project_onto_hull(p, V)
    return bool(np.linalg.norm(p - q) <= tol)


def _prune_hull(V):
    V = np.unique(np.round(V, 14), axis=0)
    if V.shape[0] <= 2:
        return V
    if V.shape[1] == 1:
        return np.array([[V.min()], [V.max()]])
    keep = []
    for i in range(V.shape[0]):
        others = np.delete(V, i, axis=0)
        if not _in_hull(V[i], others, tol=1e-11):
            keep.append(i)
    return V[keep] + 0.0


class Ball(ConvexRegion):
    """Euclidean ball; open when ``open`` is true."""

    kind = "ball"

    def __init__(self, center, radius, open=False):
        c = check_point(center, name="center")
        if not (math.isfinite(radius) and radius > 0):
            raise EmptyRegionError("ball radius must be positive and finite")
        self.center = _frozen(c)
        self.radius = float(radius)
        self.open = bool(open)
        self.dim = c.size

    @property
    def is_polyhedral(self):
        return self.dim == 1

    def as_interval(self):
        c = self.center[0]
        return IntervalProduct([c - self.radius], [c + self.radius], [self.open], [self.open])

    def contains(self, p, tol=0.0):
        p = check_point(p, self.dim)
        slack = self.radius - float(np.linalg.norm(p - self.center))
        return slack > tol if self.open else slack >= -tol

    def contains_many(self, points, tol=0.0):
        P = np.asarray(points, dtype=float).reshape(-1, self.dim)
        slack = self.radius - np.linalg.norm(P - self.center, axis=1)
        return slack > tol if self.open else slack >= -tol

    def support(self, d):
        d = check_point(d, self.dim, "direction")
        return float(self.center @ d + self.radius * np.linalg.norm(d))

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def halfspaces(self):
        if self.dim == 1:
            return self.as_interval().halfspaces()
        return super().halfspaces()

    def vertices(self):
        if self.dim == 1:
            return self.as_interval().vertices()
        return super().vertices()

    def sample(self, n=16, rng=None):
        shrink = 0.999 if self.open else 1.0
        eye = np.eye(self.dim)
        pts = [self.center] + [self.center + s * shrink * self.radius * e for e in eye for s in (1.0, -1.0)]
        pts += [self.center + 0.5 * s * self.radius * e for e in eye for s in (1.0, -1.0)]
        if rng is not None:
            g = rng.normal(size=(n, self.dim))
            g /= np.linalg.norm(g, axis=1)[:, None]
            r = self.radius * rng.uniform(0, 1, size=n) ** (1.0 / self.dim) * shrink
            pts += list(self.center + g * r[:, None])
        pts = np.array(pts)
        return pts[[self.contains(p) for p in pts]]

    def to_dict(self):
        return {"kind": "ball", "center": self.center.tolist(), "radius": self.radius, "open": self.open}

    def __repr__(self):
        return f"Ball(center={_fmt(self.center)}, radius={self.radius:.12g}, open={self.open})"


def ball(center, radius, open=False):
    """Ball constructor; a 1-D ball comes back as an interval."""
    b = Ball(center, radius, open)
    return b.as_interval() if b.dim == 1 else b


def _sample_polytope(region, n, rng):
    V = region.vertices()
    centroid = V.mean(axis=0)
    pts = [centroid] + list(V) + [0.5 * (v + centroid) for v in V]
    if len(V) > 1:
        pts += [0.5 * (V[i] + V[j]) for i in range(len(V)) for j in range(i + 1, len(V))][: 4 * n]
    rng = rng if rng is not None else np.random.default_rng(0)
    W = rng.dirichlet(np.ones(len(V)), size=n)
    pts += list(W @ V)
    pts = np.array(pts)
    return pts[[region.contains(p) for p in pts]]


def region_from_dict(d):
    kind = d.get("kind")
    if kind == "empty":
        return Empty(d["dim"])
    if kind == "interval":
        return interval(d["lo"], d["hi"], d.get("lo_open", False), d.get("hi_open", False))
    if kind == "hpolytope":
        return hpolytope(d["A"], d["b"], d.get("strict"))
    if kind == "vpolytope":
        return VPolytope(d["vertices"])
    if kind == "ball":
        return ball(d["center"], d["radius"], d.get("open", False))
    raise ValueError(f"unknown region kind {kind!r}")


# ---------------------------------------------------------------------------
# cones and compact sets in the dual space


class Cone:
    """Finitely generated cone ``{sum l_i g_i : l_i >= 0}``, or all of R^n."""

    def __init__(self, dim, generators=(), full_space=False):
        self.dim = int(dim)
        self.full_space = bool(full_space)
        G = np.asarray(generators, dtype=float).reshape(-1, self.dim) if len(generators) else np.zeros((0, self.dim))
        if G.size:
            norms = np.linalg.norm(G, axis=1)
            if np.any(np.abs(norms - 1.0) > _GEN_TOL):
                G = G / norms[:, None]
        self.generators = _frozen(G)

    @property
    def is_trivial(self):
        return not self.full_space and self.generators.shape[0] == 0

    def contains(self, s, tol=1e-9):
        s = check_point(s, self.dim, "dual vector")
        if self.full_space:
            return True
        if self.generators.shape[0] == 0:
            return float(np.linalg.norm(s)) <= tol
        _, resid = nnls(self.generators.T, s)
        return resid <= tol * max(1.0, float(np.linalg.norm(s)))

    def to_dict(self):
        return {"dim": self.dim, "full_space": self.full_space, "generators": self.generators.tolist()}

    def __repr__(self):
        if self.full_space:
            return f"Cone(full_space, dim={self.dim})"
        return f"Cone(generators={_fmt(self.generators)})"


class CompactConvexSet:
    """Convex hull of generators, or a centred ball of radius ``radius``."""

    def __init__(self, dim, generators=(), unit_ball=False, radius=1.0):
        self.dim = int(dim)
        self.unit_ball = bool(unit_ball)
        self.radius = float(radius)
        G = np.asarray(generators, dtype=float).reshape(-1, self.dim) if len(generators) else np.zeros((0, self.dim))
        self.generators = _frozen(G)
        if not self.unit_ball and G.shape[0] == 0:
            raise EmptyRegionError("CompactConvexSet needs generators or the ball flag")

    @property
    def scale(self):
        """Largest norm of an element; the positive homogeneity factor."""
        if self.unit_ball:
            return self.radius
        return float(np.max(np.linalg.norm(self.generators, axis=1)))

    def scaled(self, factor):
        if self.unit_ball:
            return CompactConvexSet(self.dim, unit_ball=True, radius=self.radius * factor)
        return CompactConvexSet(self.dim, self.generators * factor)

    def vertices(self):
        """Points whose hull is the set; a ball is inner-approximated by
        its cross-polytope (exact in one dimension)."""
        if self.unit_ball:
            eye = np.eye(self.dim) * self.radius
            return np.vstack([eye, -eye])
        return self.generators

    def contains(self, s, tol=1e-9):
        s = check_point(s, self.dim, "dual vector")
        if self.unit_ball:
            return float(np.linalg.norm(s)) <= self.radius + tol
        return _in_hull(s, self.generators, tol)

    def support(self, d):
        d = check_point(d, self.dim, "direction")
        if self.unit_ball:
            return self.radius * float(np.linalg.norm(d))
        return float(np.max(self.generators @ d))

    def min_norm_element(self):
        if self.unit_ball:
            return np.zeros(self.dim)
        x, _ = min_norm_point(self.generators)
        return x

    def to_dict(self):
        if self.unit_ball:
            return {"dim": self.dim, "unit_ball": True, "radius": self.radius}
        return {"dim": self.dim, "unit_ball": False, "generators": self.generators.tolist()}

    def __eq__(self, other):
        if not isinstance(other, CompactConvexSet) or other.dim != self.dim or other.unit_ball != self.unit_ball:
            return False
        if self.unit_ball:
            return abs(self.radius - other.radius) <= 1e-12
        a = np.unique(np.round(self.generators, 10), axis=0)
        b = np.unique(np.round(other.generators, 10), axis=0)
        return a.shape == b.shape and np.allclose(a, b, atol=1e-10)

    __hash__ = None

    def __repr__(self):
        if self.unit_ball:
            return f"CompactConvexSet(ball, dim={self.dim}, radius={self.radius:.12g})"
        return f"CompactConvexSet(co {_fmt(self.generators)})"


# ---------------------------------------------------------------------------
# public operations


def membership(region, p, tol=0.0):
    """True iff ``p`` lies in ``region`` at tolerance ``tol``."""
    tol = check_tol(tol)
    p = check_point(p)
    check_same_dim(region.dim, p.size)
    return region.contains(p, tol)


def support(region, direction):
    """``sup <direction, w>`` over the closure; ``-inf`` when empty."""
    d = check_point(direction, name="direction")
    check_same_dim(region.dim, d.size)
    return region.support(d)


def _extreme_rays(M, tol=1e-10):
    """Generators of ``{s : M s <= 0}`` as unit vectors.

    The lineality space is split off first; extreme rays of the pointed
    part are found by enumerating rank-deficient row subsets.
    """
    n = M.shape[1]
    if M.shape[0]:
        norms = np.linalg.norm(M, axis=1)
        M = M[norms > 1e-12] / norms[norms > 1e-12, None]
        M = np.unique(np.round(M, 13), axis=0)
    if M.shape[0] == 0:
        return None  # whole space
    L = null_space(M, rcond=1e-10)
    gens = []
    for col in L.T:
        gens += [col, -col]
    Q = null_space(L.T, rcond=1e-10) if L.shape[1] else np.eye(n)
    k = Q.shape[1]
    if k == 0:
        return np.array(gens).reshape(-1, n)
    Mq = M @ Q
    rays = []
    if k == 1:
        for sign in (1.0, -1.0):
            if np.all(Mq[:, 0] * sign <= tol):
                rays.append(np.array([sign]))
    else:
        m = Mq.shape[0]
        if math.comb(m, k - 1) > _MAX_COMBINATIONS:
            raise UnsupportedRegionError("too many facets for exact extreme-ray enumeration")
        for rows in itertools.combinations(range(m), k - 1):
            sub = Mq[list(rows)]
            ns = null_space(sub, rcond=1e-10)
            if ns.shape[1] != 1:
                continue
            u = ns[:, 0]
            for sign in (1.0, -1.0):
                v = sign * u
                if np.all(Mq @ v <= tol):
                    if not any(np.linalg.norm(v - r) < 1e-9 for r in rays):
                        rays.append(v)
    for r in rays:
        g = Q @ r
        gens.append(g / np.linalg.norm(g))
    if not gens:
        return np.zeros((0, n))
    G = np.array(gens)
    return G[np.lexsort(np.round(G, 12).T[::-1])]


def _ball_cone(region, base):
    d = region.center - base
    dist = float(np.linalg.norm(d))
    r = region.radius
    if region.dim > 2:
        raise UnsupportedRegionError("ball normal cones are exact only up to dimension 2")
    if dist < r * (1 - 1e-12):
        return Cone(2)
    u = -d / dist
    if dist <= r * (1 + 1e-12):
        return Cone(2, [u])
    half = math.acos(r / dist)
    rot = lambda th: np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    gens = np.array([rot(-half) @ u, rot(half) @ u])
    return Cone(2, gens[np.lexsort(np.round(gens, 12).T[::-1])])


def normal_cone_at(region, base):
    """Polar of ``closure(region) - base``; the whole space if empty.

    ``base`` need not belong to the region.
    """
    base = check_point(base, name="base")
    check_same_dim(region.dim, base.size)
    n = base.size
    if region.is_empty:
        return Cone(n, full_space=True)
    if n > MAX_DIM:
        raise UnsupportedRegionError(f"dimension {n} exceeds {MAX_DIM}")
    if isinstance(region, Ball) and n > 1:
        return _ball_cone(region, base)
    if n == 1:
        lo, hi = region.bounding_box()
        lo, hi = float(lo[0]), float(hi[0])
        b = float(base[0])
        gens = []
        if lo >= b:
            gens.append([-1.0])
        if hi <= b:
            gens.append([1.0])
        if lo == hi == b:
            return Cone(1, full_space=True)
        return Cone(1, gens)
    M = region.vertices() - base
    G = _extreme_rays(M)
    if G is None:
        return Cone(n, full_space=True)
    return Cone(n, G)


def project(p, region):
    """Nearest point of the closure of ``region``."""
    p = check_point(p)
    check_same_dim(region.dim, p.size)
    if region.is_empty:
        raise EmptyRegionError("cannot project onto an empty region")
    if isinstance(region, IntervalProduct):
        return np.clip(p, region.lo, region.hi)
    if isinstance(region, Ball):
        d = p - region.center
        dist = float(np.linalg.norm(d))
        if dist <= region.radius:
            return p.copy()
        return region.center + d * (region.radius / dist)
    q, _ = project_onto_hull(p, region.vertices())
    return q


# ---------------------------------------------------------------------------
# disjointness


@dataclass(frozen=True)
class Disjointness:
    disjoint: bool
    witness: np.ndarray = None
    method: str = "lp"
    resolution: int = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.disjoint


def _lp_overlap(a, b, tol):
    """Exact overlap test for polyhedral regions (H or V form)."""
    n = a.dim
    blocks = []  # (rows_x, b, strict) and V-blocks
    vblocks = []
    for r in (a, b):
        if isinstance(r, VPolytope) and r.dim > 1:
            vblocks.append(r.vertices())
        else:
            blocks.append(r.halfspaces())
    lo_a, hi_a = a.bounding_box()
    lo_b, hi_b = b.bounding_box()
    lo = np.maximum(lo_a, lo_b) - tol
    hi = np.minimum(hi_a, hi_b) + tol
    if np.any(lo > hi):
        return Disjointness(True, method="lp")
    n_aux = sum(V.shape[0] for V in vblocks)
    nv = n + n_aux + 1
    rows, rhs = [], []
    any_strict = False
    for A, bb, strict in blocks:
        for ai, bi, si in zip(A, bb, strict):
            row = np.zeros(nv)
            row[:n] = ai
            if si:
                row[-1] = 1.0
                any_strict = True
                rows.append(row)
                rhs.append(bi)
            else:
                rows.append(row)
                rhs.append(bi + tol)
    eq_rows, eq_rhs = [], []
    off = n
    for V in vblocks:
        k = V.shape[0]
        for i in range(n):
            row = np.zeros(nv)
            row[i] = 1.0
            row[off : off + k] = -V[:, i]
            eq_rows.append(row)
            eq_rhs.append(0.0)
        row = np.zeros(nv)
        row[off : off + k] = 1.0
        eq_rows.append(row)
        eq_rhs.append(1.0)
        off += k
    c = np.zeros(nv)
    c[-1] = -1.0
    box_lo = np.concatenate([lo, np.zeros(n_aux), [0.0]])
    box_hi = np.concatenate([hi, np.ones(n_aux), [1.0 if any_strict else 0.0]])
    A_ub = np.array(rows).reshape(-1, nv)
    eq = (np.array(eq_rows).reshape(-1, nv), np.array(eq_rhs)) if eq_rows else None
    try:
        res = lp_solve(c, (A_ub, np.array(rhs)), (box_lo, box_hi), eq=eq, lexicographic=True)
    except InfeasibleLPError:
        return Disjointness(True, method="lp")
    margin = -res.value
    if any_strict and margin <= tol:
        return Disjointness(True, method="lp", details={"margin": margin})
    return Disjointness(False, witness=res.x[:n], method="lp", details={"margin": margin})


def _interval_overlap(a, b, tol):
    """Closed form of :func:`_lp_overlap` for two interval products.

    The LP separates by coordinate: with closed bounds ``[Lc, Uc]`` (padded
    by ``tol``) and strict bounds ``(Ls, Us)``, the best strict margin on
    coordinate ``i`` is ``min(Uc - Ls, Us - Lc, (Us - Ls) / 2)``.  The
    witness comes from the unpadded problem when that one overlaps too.
    """
    d = _interval_margin(a, b, tol)
    if not d.disjoint and tol > 0:
        exact = _interval_margin(a, b, 0.0)
        if not exact.disjoint:
            return Disjointness(False, witness=exact.witness, method=d.method, details=d.details)
    return d


def _interval_margin(a, b, tol):
    Lc = np.full(a.dim, -np.inf)
    Uc = np.full(a.dim, np.inf)
    Ls = np.full(a.dim, -np.inf)
    Us = np.full(a.dim, np.inf)
    for r in (a, b):
        Lc = np.maximum(Lc, np.where(r.lo_open, -np.inf, r.lo - tol))
        Uc = np.minimum(Uc, np.where(r.hi_open, np.inf, r.hi + tol))
        Ls = np.maximum(Ls, np.where(r.lo_open, r.lo, -np.inf))
        Us = np.minimum(Us, np.where(r.hi_open, r.hi, np.inf))
    # the bounding-box rows of the LP
    Lc = np.maximum(Lc, np.maximum(a.lo, b.lo) - tol)
    Uc = np.minimum(Uc, np.minimum(a.hi, b.hi) + tol)
    if np.any(Lc > Uc):
        return Disjointness(True, method="exact-interval")
    any_strict = bool(np.any(np.isfinite(Ls)) or np.any(np.isfinite(Us)))
    with np.errstate(invalid="ignore"):
        per_axis = np.minimum(np.minimum(Uc - Ls, Us - Lc), 0.5 * (Us - Ls))
    margin = float(min(1.0, np.min(per_axis))) if any_strict else 0.0
    if margin < 0 or (any_strict and margin <= tol):
        return Disjointness(True, method="exact-interval", details={"margin": margin})
    witness = np.maximum(Lc, Ls + margin)
    return Disjointness(False, witness=witness, method="exact-interval", details={"margin": margin})


def _ball_overlap(a, b, tol):
    d = float(np.linalg.norm(a.center - b.center))
    if d == 0:
        margin = min(a.radius, b.radius)
        witness = a.center.copy()
    else:
        u = (b.center - a.center) / d
        # point on the segment balancing both slacks
        lo_pt = max(-a.radius, d - b.radius)
        hi_pt = min(a.radius, d + b.radius)
        s = 0.5 * (lo_pt + hi_pt)
        witness = a.center + s * u
        margin = min(a.radius - abs(s), b.radius - abs(d - s))
    overlap = a.contains(witness, tol) and b.contains(witness, tol)
    return Disjointness(not overlap, witness=None if not overlap else witness, method="exact-ball", details={"margin": margin})


def _sample_ball_grid(bl, resolution):
    k = resolution
    axes = [np.linspace(c - bl.radius, c + bl.radius, k) for c in bl.center]
    pts = np.array(list(itertools.product(*axes)))
    return pts[np.linalg.norm(pts - bl.center, axis=1) <= bl.radius]


def _ball_poly_overlap(bl, poly, tol, resolution):
    q = project(bl.center, poly)
    dist = float(np.linalg.norm(q - bl.center))
    if dist > bl.radius + tol:
        return Disjointness(True, method="exact-ball", details={"distance": dist})
    cands = [q + t * (bl.center - q) for t in np.linspace(0.0, 1.0, 11)]
    cands += list(poly.sample(32))
    cands += list(_sample_ball_grid(bl, resolution))
    for p in cands:
        if bl.contains(p, tol) and poly.contains(p, tol):
            return Disjointness(False, witness=np.asarray(p), method="sampling", resolution=resolution)
    return Disjointness(True, method="sampling", resolution=resolution, details={"distance": dist})


def disjointness(a, b, tol=0.0, resolution=41):
    """Full disjointness record for regions ``a`` and ``b``.

    Overlap means some point is a member of both at tolerance ``tol``.
    Interval products are decided in closed form, other polyhedral pairs
    exactly by LP; pairs involving a ball of
    dimension >= 2 are decided exactly when the closures are apart and by
    sampling at ``resolution`` points per axis otherwise.
    """
    tol = check_tol(tol)
    check_same_dim(a.dim, b.dim)
    if a.is_empty or b.is_empty:
        return Disjointness(True, method="empty")
    a_ball = isinstance(a, Ball) and a.dim > 1
    b_ball = isinstance(b, Ball) and b.dim > 1
    if a_ball and b_ball:
        return _ball_overlap(a, b, tol)
    if a_ball:
        return _ball_poly_overlap(a, b, tol, resolution)
    if b_ball:
        return _ball_poly_overlap(b, a, tol, resolution)
    a = a.as_interval() if isinstance(a, Ball) else a
    b = b.as_interval() if isinstance(b, Ball) else b
    if isinstance(a, IntervalProduct) and isinstance(b, IntervalProduct):
        return _interval_overlap(a, b, tol)
    return _lp_overlap(a, b, tol)


def regions_disjoint(a, b, tol=0.0):
    return disjointness(a, b, tol).disjoint


def _cutting_rows(region, box):
    """Halfspace rows of ``region`` that actually cut the closed ``box``."""
    if isinstance(region, Ball) and region.dim == 1:
        region = region.as_interval()
    A, b, strict = region.halfspaces()
    sup = np.maximum(A * box.lo, A * box.hi).sum(axis=1)
    eps = 1e-12 * (1.0 + np.abs(b))
    # a strict face on the box boundary still excludes those boundary points
    keep = (sup > b + eps) | (strict & (sup >= b - eps))
    return A[keep], b[keep], strict[keep]


def _interval_relative_overlap(regions, box, tol):
    L, U = box.lo.copy(), box.hi.copy()
    L_open = np.zeros(box.dim, bool)
    U_open = np.zeros(box.dim, bool)
    for r in regions:
        eps_lo = 1e-12 * (1.0 + np.abs(box.lo))
        cut_lo = (r.lo > box.lo + eps_lo) | (r.lo_open & (r.lo >= box.lo - eps_lo))
        lo = np.where(cut_lo, r.lo + tol, box.lo)
        lo_open = cut_lo & r.lo_open
        L_open = np.where(lo > L, lo_open, np.where(lo == L, L_open | lo_open, L_open))
        L = np.maximum(L, lo)
        eps_hi = 1e-12 * (1.0 + np.abs(box.hi))
        cut_hi = (r.hi < box.hi - eps_hi) | (r.hi_open & (r.hi <= box.hi + eps_hi))
        hi = np.where(cut_hi, r.hi - tol, box.hi)
        hi_open = cut_hi & r.hi_open
        U_open = np.where(hi < U, hi_open, np.where(hi == U, U_open | hi_open, U_open))
        U = np.minimum(U, hi)
    ok = (L < U) | ((L == U) & ~L_open & ~U_open)
    if not ok.all():
        return Disjointness(True, method="interval-relative")
    return Disjointness(False, witness=0.5 * (L + U), method="interval-relative")


def _chebyshev(A, b, box):
    """Point of ``{A z <= b}`` inside ``box`` with the largest common slack."""
    n = box.dim
    if A.shape[0] == 0:
        return 0.5 * (box.lo + box.hi), np.inf
    A_ub = np.hstack([A, np.ones((A.shape[0], 1))])
    span = float(np.max(box.hi - box.lo)) + 1.0
    res = lp_solve(np.r_[np.zeros(n), -1.0], (A_ub, b), (np.r_[box.lo, -span], np.r_[box.hi, span]),
                   lexicographic=False)
    return res.x[:n], -res.value


def _ball_relative_overlap(bl, A, b, strict, box, tol):
    reach = bl.radius - tol
    if reach < 0 or (reach == 0 and bl.open):
        return Disjointness(True, method="exact-ball-relative")
    try:
        m, slack = _chebyshev(A, b, box)
    except InfeasibleLPError:
        return Disjointness(True, method="exact-ball-relative")
    if slack < -1e-12 or (strict.any() and slack <= 1e-12):
        return Disjointness(True, method="exact-ball-relative", details={"slack": slack})
    if A.shape[0]:
        shrunk = HPolytope(np.vstack([A, np.eye(box.dim), -np.eye(box.dim)]), np.concatenate([b, box.hi, -box.lo]))
    else:
        shrunk = box
    q = project(bl.center, shrunk)
    dist = float(np.linalg.norm(q - bl.center))
    if dist > reach or (dist == reach and (bl.open or strict.any())):
        return Disjointness(True, method="exact-ball-relative", details={"distance": dist})
    w = q
    if strict.any():
        theta = 1.0
        for _ in range(80):
            w = q + theta * (m - q)
            if np.linalg.norm(w - bl.center) < reach:
                break
            theta *= 0.5
    return Disjointness(False, witness=w, method="exact-ball-relative", details={"distance": dist})


def relative_overlap(a, b, box, tol=0.0):
    """Disjointness of ``a`` and ``b`` inside the closed ``box`` where an
    overlap witness has to beat ``tol``.

    A witness lies in ``box`` and keeps slack ``>= tol`` (closed faces) or
    ``> tol`` (strict faces) on every face of ``a`` and ``b`` that cuts the
    box.  Closed faces on or outside the box boundary impose nothing beyond
    the box; strict faces on the boundary still count, since the points
    they exclude belong to the box.  Larger ``tol`` can only turn an overlap into disjointness.
    Ball pairs in dimension >= 2 fall back to :func:`disjointness`.
    """
    tol = check_tol(tol)
    check_same_dim(a.dim, b.dim)
    check_same_dim(a.dim, box.dim)
    if a.is_empty or b.is_empty:
        return Disjointness(True, method="empty")
    a = a.as_interval() if isinstance(a, Ball) and a.dim == 1 else a
    b = b.as_interval() if isinstance(b, Ball) and b.dim == 1 else b
    if isinstance(a, IntervalProduct) and isinstance(b, IntervalProduct):
        return _interval_relative_overlap((a, b), box, tol)
    balls = [r for r in (a, b) if isinstance(r, Ball)]
    polys = [r for r in (a, b) if not isinstance(r, Ball)]
    if len(balls) == 2 or any(_rows_for(r) is None for r in polys):
        return disjointness(a, b, tol)
    n = a.dim
    rows = [_cutting_rows(r, box) for r in polys]
    A = np.vstack([r[0] for r in rows]).reshape(-1, n)
    bb = np.concatenate([r[1] for r in rows]) - tol
    strict = np.concatenate([r[2] for r in rows]).astype(bool)
    if balls:
        return _ball_relative_overlap(balls[0], A, bb, strict, box, tol)
    nv = n + 1
    A_ub = np.hstack([A, strict[:, None].astype(float)])
    c = np.zeros(nv)
    c[-1] = -1.0
    box_lo = np.concatenate([box.lo, [0.0]])
    box_hi = np.concatenate([box.hi, [1.0 if strict.any() else 0.0]])
    try:
        res = lp_solve(c, (A_ub, bb), (box_lo, box_hi), lexicographic=True)
    except InfeasibleLPError:
        return Disjointness(True, method="lp-relative")
    margin = -res.value
    if strict.any() and margin <= 1e-12:
        return Disjointness(True, method="lp-relative", details={"margin": margin})
    return Disjointness(False, witness=res.x[:n], method="lp-relative", details={"margin": margin})


# ---------------------------------------------------------------------------
# ball containment


def _sup_linear_ball_box(a, c, r, lo, hi):
    """max a.p over {|p - c| <= r} intersected with the box [lo, hi]."""
    def point(s):
        return np.clip(c + s * a, lo, hi)

    big = 1e6 * (r + 1.0)
    p_big = point(big)
    if np.linalg.norm(p_big - c) <= r:
        return float(a @ p_big)
    s_lo, s_hi = 0.0, big
    for _ in range(200):
        mid = 0.5 * (s_lo + s_hi)
        if np.linalg.norm(point(mid) - c) <= r:
            s_lo = mid
        else:
            s_hi = mid
        if s_hi - s_lo <= 1e-15 * max(1.0, s_hi):
            break
    return float(a @ point(s_lo))


def _usable_clip(c, clip):
    if clip is None:
        return None
    lo, hi = np.asarray(clip[0], float), np.asarray(clip[1], float)
    if np.any(c < lo - 1e-15) or np.any(c > hi + 1e-15):
        return None
    return lo, hi


def _rows_for(region):
    if isinstance(region, Ball) and region.dim == 1:
        return region.as_interval().halfspaces()
    if isinstance(region, VPolytope) and region.dim > 1 and region._hrep is None:
        return None
    return region.halfspaces()


def ball_inside(region, center, radius, clip=None):
    """Is the closed ball ``B(center, radius)`` (intersected with the box
    ``clip`` when given) contained in ``region``?

    Strict faces must not be touched.  Exact for polyhedral regions; for a
    ball region the clip is ignored, which can only make the answer
    more conservative.
    """
    c = np.asarray(center, dtype=float)
    if region.is_empty:
        return False
    clip = _usable_clip(c, clip)
    if isinstance(region, Ball) and region.dim > 1:
        slack = region.radius - float(np.linalg.norm(c - region.center)) - radius
        return slack > 0 if region.open else slack >= 0
    rows = _rows_for(region)
    if rows is None:
        return False
    A, b, strict = rows
    if region.dim == 1:
        lo_p, hi_p = c[0] - radius, c[0] + radius
        if clip is not None:
            lo_p, hi_p = max(lo_p, clip[0][0]), min(hi_p, clip[1][0])
        sups = np.where(A[:, 0] > 0, A[:, 0] * hi_p, A[:, 0] * lo_p)
    elif clip is None:
        sups = A @ c + radius
    else:
        sups = np.array([_sup_linear_ball_box(ai, c, radius, clip[0], clip[1]) for ai in A])
    return bool(np.all(np.where(strict, sups < b, sups <= b)))


def inner_radius(region, center, clip=None):
    """Supremum ``r`` of radii whose closed ball (clipped) fits in ``region``.

    Returns ``(r, strict)``: radius ``rho`` fits iff ``rho < r`` when
    ``strict`` and ``rho <= r`` otherwise.  ``r`` is ``inf`` when the clipped
    ball never leaves the region and negative when ``center`` is outside.
    """
    c = np.asarray(center, dtype=float)
    if region.is_empty:
        return -math.inf, False
    clip = _usable_clip(c, clip)
    if isinstance(region, Ball) and region.dim > 1:
        return region.radius - float(np.linalg.norm(c - region.center)), region.open
    rows = _rows_for(region)
    if rows is None:
        return (0.0, False) if region.contains(c, 1e-12) else (-math.inf, False)
    A, b, strict = rows
    if region.dim == 1 or clip is None:
        radii = b - A @ c
        if clip is not None:
            a = A[:, 0]
            edge = np.where(a > 0, a * clip[1][0], a * clip[0][0])
            never = np.where(strict, edge < b, edge <= b)
            radii = np.where(never, math.inf, radii)
        r = float(np.min(radii))
        if not math.isfinite(r):
            return r, False
        binding = np.abs(radii - r) <= 0.0
        return r, bool(np.any(strict[binding]))
    # clipped n-D: bisection on the exact containment test
    if not ball_inside(region, c, 0.0, clip):
        return -math.inf, False
    lo, hi = 0.0, float(np.max(clip[1] - clip[0])) * 2.0
    if ball_inside(region, c, hi, clip):
        return math.inf, False
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if ball_inside(region, c, mid, clip):
            lo = mid
        else:
            hi = mid
    return lo, False


def inner_radii(region, centers, clip=None):
    """Vectorised :func:`inner_radius` over the rows of ``centers``."""
    Z = np.atleast_2d(np.asarray(centers, dtype=float))
    k = Z.shape[0]
    if region.is_empty:
        return np.full(k, -math.inf), np.zeros(k, bool)
    if isinstance(region, Ball) and region.dim > 1:
        r = region.radius - np.linalg.norm(Z - region.center, axis=1)
        return r, np.full(k, region.open)
    rows = _rows_for(region)
    if rows is None or (region.dim > 1 and clip is not None):
        out = [inner_radius(region, z, clip) for z in Z]
        return np.array([o[0] for o in out]), np.array([o[1] for o in out], bool)
    A, b, strict = rows
    radii = b[None, :] - Z @ A.T
    if clip is not None:
        lo, hi = float(np.asarray(clip[0])[0]), float(np.asarray(clip[1])[0])
        a = A[:, 0]
        edge = np.where(a > 0, a * hi, a * lo)
        never = np.where(strict, edge < b, edge <= b)
        radii = np.where(never[None, :], math.inf, radii)
        inside = (Z[:, 0] >= lo - 1e-15) & (Z[:, 0] <= hi + 1e-15)
        if not np.all(inside):
            radii[~inside] = (b[None, :] - Z[~inside] @ A.T)
    r = radii.min(axis=1)
    binding = radii == r[:, None]
    strict_hit = np.any(binding & strict[None, :], axis=1) & np.isfinite(r)
    return r, strict_hit
