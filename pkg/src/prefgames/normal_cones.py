"""Normal cone operators of preference maps and the principal operator F.

``N_P(x, y)`` is the polar of ``P(x, y) - x`` (all of the dual space when
``P(x, y)`` is empty).  ``F(x, y)`` is the unit ball when ``P(x, y)`` is
empty and otherwise the convex hull of the unit extreme rays of
``N_P(x, y)``.

The cap construction builds, around an anchor, a hyperplane ``H`` cutting
every nearby normal cone in a bounded slice ``T = N_P & H`` that avoids 0.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import convex_geometry as cg
from ._minnorm import project_onto_hull
from ._rng import stage_rng
from .exceptions import DegenerateConeError, PreconditionError, PropertyViolation, SearchFailure
from .preferences import Resolution, _neighbours, _tuple, check_lower_midpoint, check_upper_midpoint

__all__ = [
    "NormalOperator",
    "normal_operator",
    "f_operator",
    "CapWitness",
    "cap_witness",
    "cap_operator",
    "blended_cap_operator",
    "check_properties",
    "PROPERTIES",
]


def normal_operator(P, x, y=None):
    """The cone ``N_P(x, y)``."""
    x, y = P.check_args(x, y)
    return cg.normal_cone_at(P(x, y), x)


class NormalOperator:
    """Callable wrapper ``(x, y) -> N_P(x, y)`` around a preference map."""

    def __init__(self, P):
        self.P = P

    def __call__(self, x, y=None):
        return normal_operator(self.P, x, y)


def _opposite_generators(cone, tol=1e-9):
    """Generators ``g`` of ``cone`` with ``-g`` also in the cone."""
    return [g for g in cone.generators if cone.contains(-g, tol)]


def f_operator(P, x, y=None, allow_degenerate=False):
    """The principal operator value ``F(x, y)``.

    Raises DegenerateConeError when the normal cone is ``{0}``, the whole
    space at a non-empty value, or has a non-trivial lineality space.  With
    ``allow_degenerate`` the hull of the unit generators is returned anyway
    where one exists.
    """
    x, y = P.check_args(x, y)
    region = P(x, y)
    n = P.own_dim
    if region.is_empty:
        return cg.CompactConvexSet(n, unit_ball=True)
    cone = cg.normal_cone_at(region, x)
    if cone.full_space:
        if allow_degenerate:
            return cg.CompactConvexSet(n, unit_ball=True)
        raise DegenerateConeError(f"P({x}) is the single point {x}; its normal cone is the whole space")
    if cone.generators.shape[0] == 0:
        raise DegenerateConeError(f"normal cone at x={x} is {{0}}: x lies in the interior of P(x)")
    if not allow_degenerate and _opposite_generators(cone):
        raise DegenerateConeError(f"normal cone at x={x} contains a line")
    return cg.CompactConvexSet(n, cone.generators)


# ---------------------------------------------------------------------------
# cap construction


@dataclass(frozen=True)
class CapWitness:
    """Local data ``(w, t, eps)`` of the cap construction at an anchor.

    The ball of radius ``2 eps`` around ``t x_bar + (1 - t) w_bar`` lies in
    ``P(x, y)`` for every sampled ``(x, y)`` blockwise within ``eps`` of the
    anchor.  ``h`` is the hyperplane normal: ``H = {s : <h, s> = eps}``
    with ``h = (1 - t)(x_bar - w_bar)``.
    """

    anchor_x: np.ndarray
    anchor_y: np.ndarray
    w: np.ndarray
    t: float
    eps: float
    h: np.ndarray
    resolution: dict = field(default_factory=dict)

    @property
    def center(self):
        return self.t * self.anchor_x + (1.0 - self.t) * self.w

    def within(self, x, y=None, slack=1e-12):
        if np.linalg.norm(np.asarray(x) - self.anchor_x) > self.eps * (1 + slack):
            return False
        if self.anchor_y is not None and np.linalg.norm(np.asarray(y) - self.anchor_y) > self.eps * (1 + slack):
            return False
        return True

    def to_dict(self):
        d = {"anchor_x": self.anchor_x.tolist(), "w": self.w.tolist(), "t": self.t, "eps": self.eps,
             "h": self.h.tolist(), "resolution": self.resolution}
        if self.anchor_y is not None:
            d["anchor_y"] = self.anchor_y.tolist()
        return d


def _fits(region_list, Z, radius):
    ok = np.ones(Z.shape[0], bool)
    for R in region_list:
        r, strict = cg.inner_radii(R, Z)
        ok &= np.where(strict, radius < r, radius <= r)
        if not ok.any():
            break
    return ok


def cap_witness(P, x_bar, y_bar=None, w=None, res=None):
    """Search ``(w, t, eps)`` with the largest ``eps`` on the radius grid
    (ties: smallest ``t``, then first sampled ``w``).

    Raises PreconditionError when ``P(x_bar, y_bar)`` is empty and
    SearchFailure when the grid holds no witness.
    """
    res = res or Resolution()
    x_bar, y_bar = P.check_args(x_bar, y_bar)
    region = P(x_bar, y_bar)
    if region.is_empty:
        raise PreconditionError("cap construction needs a non-empty P at the anchor")
    if w is not None:
        w = np.atleast_1d(np.asarray(w, float))
        if not region.contains(w):
            raise PreconditionError(f"w = {w} is not in P at the anchor")
        W = w[None, :]
    else:
        W = region.sample(res.n_w, stage_rng(res.seed, "cap"))
    ts = res.t_grid()
    m = len(ts)
    Z = (ts[None, :, None] * x_bar[None, None, :] + (1.0 - ts)[None, :, None] * W[:, None, :]).reshape(-1, P.own_dim)
    for eps in res.radius_grid(P.width()):
        nbrs = _neighbours(P, x_bar, y_bar, eps, res.n_neighbors, stage_rng(res.seed, "cap-nbrs"))
        ok = _fits([P(a, b) for a, b in nbrs], Z, 2 * eps)
        if not ok.any():
            continue
        fine = _neighbours(P, x_bar, y_bar, eps, res.n_neighbors * res.recheck_factor, stage_rng(res.seed, "cap-fine"))
        idx = np.nonzero(ok)[0]
        ok_fine = _fits([P(a, b) for a, b in fine], Z[idx], 2 * eps)
        idx = idx[ok_fine]
        if idx.size == 0:
            continue
        # order by t first, then by w
        order = sorted(idx, key=lambda k: (k % m, k // m))
        k = order[0]
        wi, ti = W[k // m], float(ts[k % m])
        h = (1.0 - ti) * (x_bar - wi)
        if np.linalg.norm(h) == 0:
            continue
        return CapWitness(x_bar, y_bar, wi.copy(), ti, float(eps), h, res.to_dict())
    raise SearchFailure(f"no cap witness at x={x_bar} down to radius {res.eps_min}")


def _hyperplane_box_slice(h, eps, half_width):
    """Vertices of {s : <h, s> = eps} inside the box [-R, R]^n."""
    n = h.size
    if n == 1:
        return np.array([[eps / h[0]]])
    pts = []
    corners = np.array(list(itertools.product([-half_width, half_width], repeat=n)))
    for c in corners:
        for i in range(n):
            if c[i] > 0:
                continue
            a, b = c.copy(), c.copy()
            b[i] = half_width
            fa, fb = h @ a - eps, h @ b - eps
            if fa == fb:
                if fa == 0:
                    pts += [a, b]
                continue
            lam = fa / (fa - fb)
            if 0 <= lam <= 1:
                pts.append(a + lam * (b - a))
    return np.unique(np.round(np.array(pts), 14), axis=0)


def cap_operator(witness, P, x, y=None):
    """The slice ``T(x, y) = N_P(x, y) & H`` as a compact set.

    A whole-space cone is cut to ``H`` inside the box of half-width
    ``max(1, eps/|h|)``, which is never empty.
    """
    x, y = P.check_args(x, y)
    if not witness.within(x, y):
        raise PreconditionError(f"({x}, {y}) is outside the eps-ball of the cap anchor")
    cone = cg.normal_cone_at(P(x, y), x)
    h, eps = witness.h, witness.eps
    if cone.full_space:
        R = max(1.0, eps / float(np.linalg.norm(h)))
        return cg.CompactConvexSet(P.own_dim, _hyperplane_box_slice(h, eps, R))
    G = cone.generators
    if G.shape[0] == 0:
        raise PropertyViolation(f"normal cone at x={x} is {{0}}; the cap slice is empty")
    hg = G @ h
    if np.any(hg <= 1e-15):
        raise PropertyViolation(f"a normal at x={x} misses the cap half-space; slice is unbounded")
    return cg.CompactConvexSet(P.own_dim, eps * G / hg[:, None])


def blended_cap_operator(witnesses, P, x, y=None, max_points=4096):
    """Finite partition-of-unity blend of cap operators over given anchors.

    Hat weights ``max(0, 1 - d/eps)`` on each anchor's ball are normalised
    and the weighted Minkowski sum of the cap values is returned.
    """
    x, y = P.check_args(x, y)
    weights, values = [], []
    for wit in witnesses:
        d = float(np.linalg.norm(x - wit.anchor_x))
        if wit.anchor_y is not None:
            d = max(d, float(np.linalg.norm(y - wit.anchor_y)))
        f = max(0.0, 1.0 - d / wit.eps)
        if f > 0:
            weights.append(f)
            values.append(cap_operator(wit, P, x, y).vertices())
    if not weights:
        raise PreconditionError(f"({x}, {y}) is not covered by any anchor")
    wsum = sum(weights)
    pts = np.zeros((1, P.own_dim))
    for f, V in zip(weights, values):
        pts = (pts[:, None, :] + (f / wsum) * V[None, :, :]).reshape(-1, P.own_dim)
        if pts.shape[0] > max_points:
            pts = cg.VPolytope(pts).vertices()
    return cg.CompactConvexSet(P.own_dim, pts)


# ---------------------------------------------------------------------------
# executable property checks

_AMBIENT = {"relative": False}


def _gate_lower(P, x, y, res):
    return check_lower_midpoint(P, x, y, Resolution(**{**res.to_dict(), **_AMBIENT})).holds


def _memo(fn):
    box = []

    def get():
        if not box:
            box.append(fn())
        return box[0]

    return get


def _check_nonzero_normal(P, x, y, gate):
    region = P(x, y)
    if region.contains(x):
        return "filtered", "x in P(x)"
    if not gate():
        return "filtered", "lower mid-point continuity not verified"
    cone = cg.normal_cone_at(region, x)
    if cone.full_space or cone.generators.shape[0] > 0:
        return "pass", None
    return "fail", {"reason": "normal cone is {0}"}


def _check_pointed(P, x, y, gate):
    region = P(x, y)
    if region.is_empty:
        return "filtered", "P(x) is empty"
    if not gate():
        return "filtered", "lower mid-point continuity not verified"
    cone = cg.normal_cone_at(region, x)
    for g in cone.generators:
        if cg.support(region, -g) - float(-g @ x) <= 1e-9 and cg.support(region, g) - float(g @ x) <= 1e-9:
            return "fail", {"generator": g.tolist()}
    return "pass", None


def _check_strict_negativity(P, x, y, res, gate, rng):
    region = P(x, y)
    if region.is_empty:
        return "filtered", "P(x) is empty"
    if not gate():
        return "filtered", "lower mid-point continuity not verified"
    cone = cg.normal_cone_at(region, x)
    G = cone.generators
    S = list(G)
    if G.shape[0] > 1:
        S += list(rng.dirichlet(np.ones(G.shape[0]), size=8) @ G)
    W = region.sample(res.n_w, rng)
    for s in S:
        if np.linalg.norm(s) < 1e-12:
            continue
        vals = (W - x) @ s
        if np.any(vals >= -1e-12):
            k = int(np.argmax(vals))
            return "fail", {"s": s.tolist(), "w": W[k].tolist(), "value": float(vals[k])}
    return "pass", None


def _check_cap_graph(P, x, y, res, rng, n_sequences, steps):
    if P(x, y).is_empty:
        return "filtered", "P(x) is empty"
    if not check_upper_midpoint(P, x, y, res).holds:
        return "filtered", "upper mid-point continuity not verified"
    try:
        wit = cap_witness(P, x, y, res=res)
    except SearchFailure:
        return "filtered", "no cap witness at resolution"
    try:
        T_star = cap_operator(wit, P, x, y)
    except PropertyViolation as exc:
        return "fail", {"reason": str(exc)}
    worst = 0.0
    for _ in range(n_sequences):
        dx = rng.normal(size=P.own_dim)
        dx /= np.linalg.norm(dx)
        dy = None
        if P.is_parametric:
            dy = rng.normal(size=P.rival_dim)
            dy /= np.linalg.norm(dy)
        c = rng.normal(size=P.own_dim)
        s_k = None
        for k in range(steps):
            r = 0.9 * wit.eps * 2.0 ** -k
            xk = np.clip(x + r * dx, P.domain.lo, P.domain.hi)
            yk = None if dy is None else np.clip(y + r * dy, P.rival_domain.lo, P.rival_domain.hi)
            try:
                Tk = cap_operator(wit, P, xk, yk)
            except PropertyViolation as exc:
                return "fail", {"reason": str(exc), "x_k": xk.tolist()}
            V = Tk.vertices()
            if np.max(np.linalg.norm(V, axis=1)) > 1 + 1e-9:
                return "fail", {"reason": "cap value leaves the unit ball", "x_k": xk.tolist()}
            s_k = V[int(np.argmax(V @ c))]
        if not T_star.contains(s_k, 1e-6):
            return "fail", {"reason": "graph limit outside the cap value", "limit": s_k.tolist()}
        if T_star.unit_ball:
            continue
        q = project_onto_hull(s_k, T_star.generators)[0]
        worst = max(worst, float(np.linalg.norm(q - s_k)))
    return "pass", {"max_gap": worst}


PROPERTIES = ("nonzero_normal", "pointed", "strict_negativity", "cap_graph")


def check_properties(P, which, points, rivals=None, res=None, n_sequences=10, steps=20, seed=0):
    """Run property checks over sample points.

    ``which`` is a subset of :data:`PROPERTIES`:

    - ``nonzero_normal``: ``N_P(x)`` holds a nonzero vector;
    - ``pointed``: ``N_P(x)`` has trivial lineality;
    - ``strict_negativity``: ``<s, w - x> < 0`` for nonzero ``s`` in
      ``N_P(x)`` and ``w`` in ``P(x)``;
    - ``cap_graph``: cap-operator values along convergent sequences stay
      in the unit ball and their limits lie in the value at the limit.

    Points that fail a property's hypotheses are filtered, not counted as
    failures.
    Returns ``{name: {"checked", "filtered", "violations"}}``.
    """
    res = res or Resolution()
    rng = stage_rng(seed, "properties")
    report = {}
    for name in which:
        if name not in PROPERTIES:
            raise ValueError(f"unknown property {name!r}")
        report[name] = {"checked": 0, "filtered": 0, "violations": [], "filter_reasons": {}}
    for i, x in enumerate(points):
        y = None if rivals is None else rivals[i]
        x, y = P.check_args(x, y)
        gate = _memo(lambda: _gate_lower(P, x, y, res))
        for name in which:
            if name == "nonzero_normal":
                outcome, info = _check_nonzero_normal(P, x, y, gate)
            elif name == "pointed":
                outcome, info = _check_pointed(P, x, y, gate)
            elif name == "strict_negativity":
                outcome, info = _check_strict_negativity(P, x, y, res, gate, rng)
            else:
                outcome, info = _check_cap_graph(P, x, y, res, rng, n_sequences, steps)
            entry = report[name]
            if outcome == "filtered":
                entry["filtered"] += 1
                entry["filter_reasons"][info] = entry["filter_reasons"].get(info, 0) + 1
            else:
                entry["checked"] += 1
                if outcome == "fail":
                    entry["violations"].append({"x": _tuple(x), "y": _tuple(y), **info})
    for entry in report.values():
        entry["passed"] = not entry["violations"]
    return report
