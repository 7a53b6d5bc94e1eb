"""Non-ordered preference maps and sampled mid-point continuity checks.

A :class:`PreferenceMap` sends a point ``x`` of its domain box (and, in the
parametric form, a rival point ``y``) to a convex region ``P(x)`` or
``P(x, y)`` of strictly preferred points.

Continuity verdicts are semi-decisions stamped with the resolution that
produced them.  A counterexample is exact at that resolution; a verified
verdict means only that a witness was found on the search grid.  All
openness notions are relative to the domain box.
"""

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import convex_geometry as cg
from ._rng import stage_rng
from ._validation import check_point, check_positive_int
from .exceptions import ConvexityError, DimensionMismatchError, OutOfDomainError

__all__ = [
    "Resolution",
    "PreferenceMap",
    "MidpointVerdict",
    "ProbeVerdict",
    "from_utility",
    "evaluate",
    "check_lower_midpoint",
    "check_upper_midpoint",
    "check_open_valued",
    "check_internal_points",
    "check_lsc",
    "check_relation_lsc",
    "check_irreflexive",
    "classify_sufficient_conditions",
    "sample_domain",
]

_DOMAIN_TOL = 1e-12


@dataclass(frozen=True)
class Resolution:
    """Sampling parameters shared by every continuity probe.

    ``m`` sets the t-grid ``{0, 1/m, ..., (m-1)/m}``; radii run over a
    halving grid from half the domain width down to ``eps_min``.
    """

    m: int = 64
    eps_min: float = 1e-4
    n_w: int = 17
    n_neighbors: int = 11
    recheck_factor: int = 10
    relative: bool = True
    seed: int = 0

    def __post_init__(self):
        check_positive_int(self.m, "m")
        check_positive_int(self.n_w, "n_w")
        check_positive_int(self.n_neighbors, "n_neighbors", minimum=2)
        check_positive_int(self.recheck_factor, "recheck_factor")
        if not (self.eps_min > 0 and math.isfinite(self.eps_min)):
            raise ValueError("eps_min must be positive")

    def t_grid(self):
        return np.arange(self.m) / self.m

    def radius_grid(self, width):
        out = []
        r = 0.5 * width
        while r >= self.eps_min:
            out.append(r)
            r *= 0.5
        return np.array(out if out else [self.eps_min])

    def finer(self):
        f = self.recheck_factor
        return Resolution(
            m=self.m * f,
            eps_min=self.eps_min,
            n_w=self.n_w * f,
            n_neighbors=self.n_neighbors * f,
            recheck_factor=1,
            relative=self.relative,
            seed=self.seed,
        )

    def to_dict(self):
        return asdict(self)


def _as_box(domain):
    if isinstance(domain, cg.IntervalProduct):
        if np.any(domain.lo_open) or np.any(domain.hi_open):
            raise ValueError("domains must be closed boxes")
        return domain
    lo, hi = domain
    return cg.IntervalProduct(lo, hi)


class PreferenceMap:
    """``x -> P(x)`` or ``(x, y) -> P(x, y)`` with a box domain.

    ``func(x, y)`` must return a ConvexRegion of dimension ``own_dim``;
    ``y`` is ``None`` for non-parametric maps.  Values are cached.
    """

    def __init__(self, func, domain, rival_domain=None, name="custom", utility=None, spec=None, cache_size=8192):
        self.domain = _as_box(domain)
        self.rival_domain = None if rival_domain is None else _as_box(rival_domain)
        self.own_dim = self.domain.dim
        self.rival_dim = 0 if self.rival_domain is None else self.rival_domain.dim
        self.name = name
        self.utility = utility
        self.spec = spec
        self._func = func
        self._cached = lru_cache(maxsize=cache_size)(self._compute)

    @property
    def is_parametric(self):
        return self.rival_dim > 0

    def _compute(self, xb, yb):
        x = np.frombuffer(xb, dtype=float)
        y = None if yb is None else np.frombuffer(yb, dtype=float)
        region = self._func(x, y)
        if region.dim != self.own_dim:
            raise DimensionMismatchError(f"{self.name} returned a region of dimension {region.dim}")
        return region

    def check_args(self, x, y=None):
        x = self._check_block(x, self.domain, "x")
        if self.is_parametric:
            if y is None:
                raise DimensionMismatchError(f"{self.name} needs a rival point")
            y = self._check_block(y, self.rival_domain, "y")
        elif y is not None and np.size(y):
            raise DimensionMismatchError(f"{self.name} takes no rival point")
        else:
            y = None
        return x, y

    def _check_block(self, v, box, name):
        if not (isinstance(v, np.ndarray) and v.dtype == float and v.shape == (box.dim,) and np.isfinite(v).all()):
            v = check_point(v, box.dim, name)
        if (v < box.lo - _DOMAIN_TOL).any() or (v > box.hi + _DOMAIN_TOL).any():
            raise OutOfDomainError(f"{name} = {v} is outside the domain of {self.name}")
        return np.minimum(np.maximum(v, box.lo), box.hi)

    def evaluate(self, x, y=None):
        x, y = self.check_args(x, y)
        return self._cached((x + 0.0).tobytes(), None if y is None else (y + 0.0).tobytes())

    __call__ = evaluate

    def width(self):
        return float(np.max(self.domain.hi - self.domain.lo))

    def __repr__(self):
        return f"PreferenceMap({self.name!r}, own_dim={self.own_dim}, rival_dim={self.rival_dim})"


def evaluate(P, x, y=None):
    """The region ``P(x)`` or ``P(x, y)``."""
    return P.evaluate(x, y)


# ---------------------------------------------------------------------------
# utility-induced maps


def _vectorised(u, own_dim, parametric):
    """Wrap ``u`` so it maps (k, own_dim) points (and y) to k values."""

    def call(Z, y):
        arg = Z[:, 0] if own_dim == 1 else Z
        try:
            out = np.asarray(u(arg, y) if parametric else u(arg), dtype=float)
            if out.shape == (Z.shape[0],):
                return out
        except (TypeError, ValueError, IndexError):
            pass
        vals = []
        for z in Z:
            zz = float(z[0]) if own_dim == 1 else z
            vals.append(float(u(zz, y) if parametric else u(zz)))
        return np.array(vals)

    return call


def _float_bisect(inside, a_out, b_in):
    """Shrink [a_out, b_in] to adjacent floats; ``inside`` at b, not at a."""
    for _ in range(200):
        mid = a_out + 0.5 * (b_in - a_out)
        if mid == a_out or mid == b_in:
            break
        if inside(mid):
            b_in = mid
        else:
            a_out = mid
    return a_out, b_in


def _better_interval(U, x, y, lo, hi, samples, jump_tol):
    ux = float(U(np.array([[x]]), y)[0])
    width = hi - lo
    probes = [x + s * width * 2.0 ** -j for j in range(1, 45) for s in (1.0, -1.0)]
    G = np.unique(np.clip(np.concatenate([np.linspace(lo, hi, samples), [x], probes]), lo, hi))
    vals = U(G[:, None], y)
    better = vals > ux
    idx = np.nonzero(better)[0]
    if idx.size == 0:
        return cg.Empty(1)
    gaps = np.nonzero(np.diff(idx) > 1)[0]
    if gaps.size:
        i = gaps[0]
        triple = (float(G[idx[i]]), float(G[idx[i] + 1]), float(G[idx[i + 1]]))
        raise ConvexityError(f"strict upper contour set at x={x} is not an interval", triple)

    def inside(t):
        return float(U(np.array([[t]]), y)[0]) > ux

    i0, i1 = idx[0], idx[-1]
    tol = jump_tol * max(1.0, abs(ux))
    if i0 == 0:
        left, left_open = lo, False
    else:
        a, b = _float_bisect(inside, float(G[i0 - 1]), float(G[i0]))
        if float(U(np.array([[b]]), y)[0]) - ux > tol:
            left, left_open = b, False
        else:
            left, left_open = a, True
    if i1 == G.size - 1:
        right, right_open = hi, False
    else:
        b, a = _float_bisect(inside, float(G[i1 + 1]), float(G[i1]))
        if float(U(np.array([[a]]), y)[0]) - ux > tol:
            right, right_open = a, False
        else:
            right, right_open = b, True
    return cg.interval(left, right, left_open, right_open)


def _sphere_directions(n, count, rng):
    if n == 2:
        ang = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
        return np.column_stack([np.cos(ang), np.sin(ang)])
    D = rng.normal(size=(count, n))
    D = np.vstack([D, np.eye(n), -np.eye(n)])
    return D / np.linalg.norm(D, axis=1)[:, None]


def _ray_exit(inside, c, d, t_max):
    """Largest t in [0, t_max] along c + t d that stays inside."""
    if inside(c + t_max * d):
        return t_max, True
    a, b = 0.0, t_max
    for _ in range(60):
        mid = 0.5 * (a + b)
        if inside(c + mid * d):
            a = mid
        else:
            b = mid
    return a, False


def _box_exit(c, d, lo, hi):
    with np.errstate(divide="ignore", invalid="ignore"):
        t_hi = np.where(d > 0, (hi - c) / d, np.inf)
        t_lo = np.where(d < 0, (lo - c) / d, np.inf)
    return float(min(t_hi.min(), t_lo.min()))


FIT_TOLERANCE = 1e-3
_FIT_ROUNDS = 8


def _better_polytope(U, x, y, lo, hi, rng, n_dirs, check_convexity):
    n = lo.size
    ux = float(U(x[None, :], y)[0])
    k = max(5, int(round(4096 ** (1.0 / n))))
    axes = [np.linspace(l, h, k) for l, h in zip(lo, hi)]
    G = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    steps = [x + s * (hi - lo) * 2.0 ** -j * e for j in range(1, 30) for e in np.eye(n) for s in (1.0, -1.0)]
    G = np.vstack([G, np.clip(np.array(steps), lo, hi)])
    better = U(G, y) > ux
    pts = G[better]
    if pts.shape[0] == 0:
        return cg.Empty(n), 0.0
    if check_convexity and pts.shape[0] > 1:
        i = rng.integers(0, pts.shape[0], size=256)
        j = rng.integers(0, pts.shape[0], size=256)
        mids = 0.5 * (pts[i] + pts[j])
        bad = np.nonzero(U(mids, y) <= ux)[0]
        if bad.size:
            b = bad[0]
            raise ConvexityError(
                f"strict upper contour set at x={x} fails the midpoint test",
                (pts[i[b]].tolist(), mids[b].tolist(), pts[j[b]].tolist()),
            )

    def inside(p):
        return float(U(p[None, :], y)[0]) > ux

    c = pts.mean(axis=0)
    if not inside(c):
        c = pts[np.argmin(np.linalg.norm(pts - c, axis=1))]
    D = _sphere_directions(n, n_dirs, rng)
    B = []
    for d in D:
        t, _ = _ray_exit(inside, c, d, _box_exit(c, d, lo, hi))
        B.append(c + t * d)
    B = np.array(B)
    # refine: add the boundary point behind every facet centre that is off by
    # more than half the declared tolerance, then rebuild the hull
    for _ in range(_FIT_ROUNDS):
        try:
            hull = ConvexHull(B)
        except (QhullError, ValueError):
            return cg.VPolytope(B), 0.0
        err, extra = 0.0, []
        for simplex in hull.simplices:
            f = B[simplex].mean(axis=0)
            d = f - c
            dist = float(np.linalg.norm(d))
            if dist < 1e-12:
                continue
            d = d / dist
            t, _ = _ray_exit(inside, c, d, _box_exit(c, d, lo, hi))
            e = abs(t - dist)
            err = max(err, e)
            if e > 0.5 * FIT_TOLERANCE:
                extra.append(c + t * d)
        if not extra:
            break
        B = np.vstack([B, extra])
    A, b, _ = cg._normalise_rows(hull.equations[:, :-1], -hull.equations[:, -1])
    A, idx = np.unique(np.round(A, 12), axis=0, return_index=True)
    b = b[idx]
    on_domain = np.zeros(len(b), bool)
    for r, (a, bb) in enumerate(zip(A, b)):
        for i in range(n):
            if abs(a[i] - 1) < 1e-9 and abs(bb - hi[i]) < 1e-9:
                on_domain[r] = True
            if abs(a[i] + 1) < 1e-9 and abs(bb + lo[i]) < 1e-9:
                on_domain[r] = True
    return cg.hpolytope(A, b, ~on_domain), err


def from_utility(u, domain, rival_domain=None, *, name="utility", samples=513, n_dirs=None,
                 jump_tol=1e-9, check_convexity=True, seed=0, spec=None):
    """Preference map ``x -> {z in domain : u(z) > u(x)}``.

    In one dimension the value is an exact interval: the contour boundary
    is bisected to adjacent floats and an endpoint is closed exactly when
    ``u`` jumps there.  In higher dimensions the value is a polytope fitted
    through boundary points found along rays; facets on the domain boundary
    are closed, all others strict.  ``P.fit_errors`` collects the measured
    fit error of every n-D evaluation.

    ``u`` takes the own point (a float in 1-D) and, for parametric maps,
    the rival point; vectorised callables are used when possible.
    """
    box = _as_box(domain)
    rbox = None if rival_domain is None else _as_box(rival_domain)
    parametric = rbox is not None
    U = _vectorised(u, box.dim, parametric)
    lo, hi = box.lo, box.hi
    n_dirs = n_dirs or (128 if box.dim == 2 else 300)
    holder = {}

    def func(x, y):
        if box.dim == 1:
            return _better_interval(U, float(x[0]), y, float(lo[0]), float(hi[0]), samples, jump_tol)
        region, err = _better_polytope(U, x, y, lo, hi, stage_rng(seed, "fit"), n_dirs, check_convexity)
        holder["P"].fit_errors.append(err)
        return region

    def util(z, y=None):
        z = np.atleast_1d(np.asarray(z, float))
        return float(U(z[None, :], y)[0])

    P = PreferenceMap(func, box, rbox, name=name, utility=util, spec=spec)
    P.fit_errors = []
    P.fit_tolerance = 0.0 if box.dim == 1 else FIT_TOLERANCE
    holder["P"] = P
    return P


# ---------------------------------------------------------------------------
# verdict records


def _clean(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


@dataclass(frozen=True)
class MidpointVerdict:
    """Outcome of a mid-point continuity probe at one point.

    ``status`` is ``"verified-at-resolution"`` or ``"counterexample"``.
    ``witness`` summarises the weakest witness found: ``t``, the radius
    ``eps`` (lower) or the neighbourhood radius ``delta`` (upper).
    """

    kind: str
    x: tuple
    y: tuple
    status: str
    vacuous: bool = False
    witness: dict = None
    witnesses: tuple = ()
    counterexample: dict = None
    recheck_passed: bool = None
    resolution: dict = field(default_factory=dict)

    @property
    def holds(self):
        return self.status == "verified-at-resolution"

    def __bool__(self):
        return self.holds

    def to_dict(self):
        d = {
            "kind": self.kind,
            "x": list(self.x),
            "status": self.status,
            "vacuous": self.vacuous,
            "witness": self.witness,
            "counterexample": self.counterexample,
            "recheck_passed": self.recheck_passed,
            "resolution": self.resolution,
        }
        if self.y:
            d["y"] = list(self.y)
        return _clean(d)


@dataclass(frozen=True)
class ProbeVerdict:
    """Sampled verdict for openness, internal points or semicontinuity."""

    name: str
    holds: bool
    counterexample: dict = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds

    def to_dict(self):
        return _clean({"name": self.name, "holds": self.holds, "counterexample": self.counterexample, "details": self.details})


def _tuple(a):
    return () if a is None else tuple(float(v) for v in np.atleast_1d(a))


def _sample_values(region, res, label):
    return region.sample(res.n_w, stage_rng(res.seed, label))


def _ball_points(center, radius, count, rng, clip):
    n = center.size
    if n == 1:
        pts = center[0] + radius * np.linspace(-1.0, 1.0, count)[:, None]
    else:
        D = rng.normal(size=(count, n))
        D /= np.linalg.norm(D, axis=1)[:, None]
        pts = np.vstack([center + radius * D, center + 0.5 * radius * D])
        pts = np.vstack([pts, center + radius * np.eye(n), center - radius * np.eye(n)])
    if clip is not None:
        pts = np.clip(pts, clip[0], clip[1])
    return pts


# ---------------------------------------------------------------------------
# lower mid-point continuity


def _lower_search(P, x, y, res, t_values, label):
    region = P(x, y)
    clip = (P.domain.lo, P.domain.hi) if res.relative else None
    if region.is_empty:
        return region, [], None
    radii = res.radius_grid(P.width())
    W = _sample_values(region, res, label)
    witnesses = []
    for w in W:
        Z = t_values[:, None] * x[None, :] + (1.0 - t_values)[:, None] * w[None, :]
        r, strict = cg.inner_radii(region, Z, clip)
        fits = np.where(strict[:, None], radii[None, :] < r[:, None], radii[None, :] <= r[:, None])
        has = fits.any(axis=1)
        if not has.any():
            return region, witnesses, {"w": w, "reason": "no ball around any t-grid point fits in P(x)"}
        best_eps = np.where(has, radii[np.argmax(fits, axis=1)], -1.0)
        i = int(np.argmax(best_eps))  # first maximiser = smallest t
        witnesses.append({"w": w, "t": float(t_values[i]), "eps": float(best_eps[i]), "center": Z[i]})
    return region, witnesses, None


def _recheck_lower(P, region, witnesses, res):
    clip = (P.domain.lo, P.domain.hi) if res.relative else None
    rng = stage_rng(res.seed, "lower-recheck")
    count = res.m * res.recheck_factor + 1
    for wit in witnesses:
        pts = _ball_points(np.asarray(wit["center"]), wit["eps"], count, rng, clip)
        if not np.all(region.contains_many(pts)):
            return False
    return True


def _midpoint_verdict(kind, x, y, res, witnesses, counter, recheck, vacuous=False, key="eps"):
    if counter is not None:
        return MidpointVerdict(kind, _tuple(x), _tuple(y), "counterexample", counterexample=_clean(counter),
                               resolution=res.to_dict())
    summary = None
    if witnesses:
        weakest = min(witnesses, key=lambda w: (w[key], w["t"]))
        summary = {"t": weakest["t"], key: weakest[key], "w": _clean(weakest["w"])}
    status = "verified-at-resolution" if recheck is not False else "counterexample"
    counter = None if recheck is not False else {"reason": "witness failed the finer recheck"}
    return MidpointVerdict(kind, _tuple(x), _tuple(y), status, vacuous=vacuous, witness=summary,
                           witnesses=tuple(_clean(w) for w in witnesses), counterexample=counter,
                           recheck_passed=recheck, resolution=res.to_dict())


def check_lower_midpoint(P, x, y=None, res=None):
    """Search, for every sampled ``w`` in ``P(x)``, a t-grid point
    ``t x + (1-t) w`` with a ball around it inside ``P(x)``.

    The largest fitting radius is reported, ties broken by the smallest
    ``t``; ``t = 0`` comes first on the grid.
    """
    res = res or Resolution()
    x, y = P.check_args(x, y)
    region, witnesses, counter = _lower_search(P, x, y, res, res.t_grid(), "lower")
    if region.is_empty:
        return _midpoint_verdict("lower", x, y, res, [], None, True, vacuous=True)
    recheck = None if counter is not None else _recheck_lower(P, region, witnesses, res)
    return _midpoint_verdict("lower", x, y, res, witnesses, counter, recheck)


# ---------------------------------------------------------------------------
# upper mid-point continuity


def _offsets(n, count, rng):
    if n == 1:
        return np.linspace(-1.0, 1.0, count)[:, None]
    D = rng.normal(size=(count, n))
    D /= np.linalg.norm(D, axis=1)[:, None]
    return np.vstack([np.zeros((1, n)), np.eye(n), -np.eye(n), D, 0.5 * D])


def _neighbours(P, x, y, delta, count, rng):
    """Sampled profiles within ``delta`` of (x, y), blockwise, in the domain."""
    ox = np.clip(x + delta * _offsets(P.own_dim, count, rng), P.domain.lo, P.domain.hi)
    if not P.is_parametric:
        X = np.unique(ox, axis=0)
        return [(xx, None) for xx in X]
    oy = np.clip(y + delta * _offsets(P.rival_dim, count, rng), P.rival_domain.lo, P.rival_domain.hi)
    m = max(len(ox), len(oy))
    pairs = [(ox[i % len(ox)], oy[(i * 7 + 3) % len(oy)]) for i in range(m)]
    pairs += [(x, yy) for yy in oy] + [(xx, y) for xx in ox]
    seen, out = set(), []
    for a, b in pairs:
        k = (a.tobytes(), b.tobytes())
        if k not in seen:
            seen.add(k)
            out.append((a, b))
    return out


def _batch_contains(regions, Z):
    """Membership matrix (regions x points); vectorised for boxes."""
    Z = np.asarray(Z, dtype=float)
    N, n = len(regions), Z.shape[1]
    if all(isinstance(R, (cg.IntervalProduct, cg.Empty)) for R in regions):
        lo = np.full((N, n), np.inf)
        hi = np.full((N, n), -np.inf)
        lo_open = np.zeros((N, n), bool)
        hi_open = np.zeros((N, n), bool)
        for k, R in enumerate(regions):
            if not R.is_empty:
                lo[k], hi[k], lo_open[k], hi_open[k] = R.lo, R.hi, R.lo_open, R.hi_open
        zl = Z[None, :, :] - lo[:, None, :]
        zh = hi[:, None, :] - Z[None, :, :]
        ok = np.where(lo_open[:, None, :], zl > 0, zl >= 0) & np.where(hi_open[:, None, :], zh > 0, zh >= 0)
        return ok.all(axis=2)
    return np.array([R.contains_many(Z) for R in regions]).reshape(N, Z.shape[0])


def _upper_search(P, x, y, res, label):
    region = P(x, y)
    if region.is_empty:
        return region, [], None
    ts = res.t_grid()
    m = len(ts)
    W = _sample_values(region, res, label)
    Z = ts[None, :, None] * x[None, None, :] + (1.0 - ts)[None, :, None] * W[:, None, :]
    Zflat = Z.reshape(-1, P.own_dim)
    pending = list(range(len(W)))
    witnesses = {}
    last_fail = {}
    for delta in res.radius_grid(P.width()):
        nbrs = _neighbours(P, x, y, delta, res.n_neighbors, stage_rng(res.seed, label + "-nbrs"))
        M = _batch_contains([P(a, b) for a, b in nbrs], Zflat).reshape(len(nbrs), len(W), m)
        ok = M.all(axis=0)
        fine = None
        still = []
        for i in pending:
            cand = np.nonzero(ok[i])[0]
            if cand.size and fine is None:
                fnbrs = _neighbours(P, x, y, delta, res.n_neighbors * res.recheck_factor,
                                    stage_rng(res.seed, label + "-recheck"))
                fine = (fnbrs, [P(a, b) for a, b in fnbrs])
            if cand.size:
                F = _batch_contains(fine[1], Z[i][cand]).all(axis=0)
                cand = cand[F]
            if cand.size:
                j = int(cand[0])
                witnesses[i] = {"w": W[i], "t": float(ts[j]), "delta": float(delta), "point": Z[i][j]}
            else:
                bad = int(np.argmax(~M[:, i, 0])) if not ok[i, 0] else 0
                a, b = nbrs[bad]
                last_fail[i] = {"w": W[i], "delta": float(delta), "neighbor_x": a, "neighbor_y": b}
                still.append(i)
        pending = still
        if not pending:
            break
    found = [witnesses[i] for i in sorted(witnesses)]
    if pending:
        c = last_fail[pending[0]]
        if c.get("neighbor_y") is None:
            c.pop("neighbor_y", None)
        c["reason"] = "no t-grid point stays preferred over the smallest neighbourhood"
        return region, found, c
    return region, found, None


def check_upper_midpoint(P, x, y=None, res=None):
    """Search, for every sampled ``w`` in ``P(x)``, a t-grid point that
    lies in ``P(x')`` for all sampled ``x'`` within ``delta`` of ``x``.

    In the parametric form the rival point is perturbed by the same radius.
    """
    res = res or Resolution()
    x, y = P.check_args(x, y)
    region, witnesses, counter = _upper_search(P, x, y, res, "upper")
    if region.is_empty:
        return _midpoint_verdict("upper", x, y, res, [], None, True, vacuous=True, key="delta")
    recheck = None if counter is not None else True  # every witness passed the finer sampling
    return _midpoint_verdict("upper", x, y, res, witnesses, counter, recheck, key="delta")


# ---------------------------------------------------------------------------
# sufficient conditions


def check_open_valued(P, x, y=None, res=None):
    """Is ``P(x)`` open relative to the domain?  Tests a ball around every
    sampled member (the ``t = 0`` branch of the lower search)."""
    res = res or Resolution()
    x, y = P.check_args(x, y)
    rel = Resolution(**{**res.to_dict(), "relative": True})
    region, _, counter = _lower_search(P, x, y, rel, np.zeros(1), "open")
    if counter is not None:
        return ProbeVerdict("open_valued", False, _clean({"x": x, "w": counter["w"]}))
    return ProbeVerdict("open_valued", True, details={"empty": region.is_empty})


def check_internal_points(P, x, y=None, res=None):
    """Is every sampled member of ``P(x)`` internal relative to the domain?

    Along each probe direction ``u`` some step ``s`` on the radius grid
    must keep ``w +- s u`` and ``w +- s u / 2`` in ``P(x)`` whenever those
    points lie in the domain.
    """
    res = res or Resolution()
    x, y = P.check_args(x, y)
    region = P(x, y)
    if region.is_empty:
        return ProbeVerdict("internal_points", True, details={"empty": True})
    n = P.own_dim
    rng = stage_rng(res.seed, "internal")
    U = np.vstack([np.eye(n), _sphere_directions(n, 8, rng) if n > 1 else np.zeros((0, 1))])
    radii = res.radius_grid(P.width())
    for w in _sample_values(region, res, "internal"):
        for u in U:
            ok = False
            for s in radii:
                pts = w[None, :] + np.array([s, -s, s / 2, -s / 2])[:, None] * u[None, :]
                in_dom = P.domain.contains_many(pts)
                if np.all(region.contains_many(pts[in_dom])):
                    ok = True
                    break
            if not ok:
                return ProbeVerdict("internal_points", False, _clean({"x": x, "w": w, "direction": u}))
    return ProbeVerdict("internal_points", True)


def _open_ball_region(center, radius, domain):
    if center.size == 1:
        lo = max(center[0] - radius, domain.lo[0])
        hi = min(center[0] + radius, domain.hi[0])
        return cg.interval(lo, hi, lo > domain.lo[0], hi < domain.hi[0])
    return cg.Ball(center, radius, open=True)


def check_lsc(P, x, y=None, res=None, radii=None):
    """Sampled lower semicontinuity of ``P`` at ``x``.

    For each sampled ``w`` in ``P(x)`` and each probe radius ``rho`` the open
    set ``U = B(w, rho)`` (relative to the domain) meets ``P(x)``; lsc asks
    for a neighbourhood of ``x`` on which every ``P(x')`` meets ``U``.  A
    counterexample is a pair ``(w, rho)`` for which a sampled ``x'`` with
    ``P(x') & U`` empty exists at every neighbourhood radius down to the
    resolution floor.
    """
    res = res or Resolution()
    x, y = P.check_args(x, y)
    region = P(x, y)
    if region.is_empty:
        return ProbeVerdict("lsc", True, details={"empty": True})
    width = P.width()
    radii = radii if radii is not None else [0.2 * width, 0.05 * width, 0.01 * width]
    deltas = res.radius_grid(width)
    rng_label = "lsc-nbrs"
    for w in _sample_values(region, res, "lsc"):
        for rho in radii:
            U = _open_ball_region(w, rho, P.domain)
            escapes = []
            for delta in deltas:
                bad = None
                for a, b in _neighbours(P, x, y, delta, res.n_neighbors, stage_rng(res.seed, rng_label)):
                    if cg.regions_disjoint(P(a, b), U):
                        bad = a
                        break
                if bad is None:
                    break
                escapes.append((float(delta), bad))
            else:
                return ProbeVerdict(
                    "lsc",
                    False,
                    _clean({"x": x, "w": w, "radius": rho, "escapes": [{"delta": d, "x_prime": a} for d, a in escapes[-3:]]}),
                )
    return ProbeVerdict("lsc", True)


def check_relation_lsc(P, x, y=None, res=None):
    """Lower semicontinuity of the strict relation at ``x``: each sampled
    ``w`` preferred to ``x`` must have a neighbourhood ``V`` (relative to the
    domain) of points all preferred to ``x``.

    A counterexample lists, for every probe radius, an escape point of
    ``B(w, rho)`` that is not preferred to ``x``.
    """
    res = res or Resolution()
    x, y = P.check_args(x, y)
    region = P(x, y)
    if region.is_empty:
        return ProbeVerdict("relation_lsc", True, details={"empty": True})
    n = P.own_dim
    rng = stage_rng(res.seed, "relation")
    D = np.vstack([np.eye(n), -np.eye(n)] + ([_sphere_directions(n, 16, rng)] if n > 1 else []))
    radii = res.radius_grid(P.width())
    for w in _sample_values(region, res, "relation"):
        escapes = []
        for rho in radii:
            pts = np.vstack([w + rho * D, w + 0.5 * rho * D])
            pts = pts[P.domain.contains_many(pts)]
            out = pts[~region.contains_many(pts)]
            if out.shape[0] == 0:
                break
            escapes.append({"radius": float(rho), "escape": out[0]})
        else:
            return ProbeVerdict("relation_lsc", False, _clean({"x": x, "w": w, "escapes": escapes}))
    return ProbeVerdict("relation_lsc", True)


def check_irreflexive(P, points, rivals=None):
    """Points ``x`` (paired with rivals, if any) with ``x in P(x)``."""
    bad = []
    for i, x in enumerate(points):
        y = None if rivals is None else rivals[i]
        x, y = P.check_args(x, y)
        if P(x, y).contains(x):
            bad.append(x if y is None else (x, y))
    return bad


def _implication(antecedent, consequent):
    return {"antecedent": bool(antecedent), "consequent": bool(consequent), "holds": bool((not antecedent) or consequent)}


def classify_sufficient_conditions(P, x, y=None, res=None):
    """Sampled verdicts for the sufficient conditions of lower and upper
    mid-point continuity, with each implication evaluated as a material
    conditional and converse failures listed.

    (a) open values => lower;  (b) internal points => lower;
    (c) lsc and open values => upper;  (d) lsc and internal points => upper.
    """
    res = res or Resolution()
    x, y = P.check_args(x, y)
    opn = check_open_valued(P, x, y, res)
    internal = check_internal_points(P, x, y, res)
    lsc = check_lsc(P, x, y, res)
    rel = check_relation_lsc(P, x, y, res)
    lower = check_lower_midpoint(P, x, y, res)
    upper = check_upper_midpoint(P, x, y, res)
    imp = {
        "a": _implication(opn.holds, lower.holds),
        "b": _implication(internal.holds, lower.holds),
        "c": _implication(lsc.holds and opn.holds, upper.holds),
        "d": _implication(lsc.holds and internal.holds, upper.holds),
    }
    converse = sorted(k for k, v in imp.items() if v["consequent"] and not v["antecedent"])
    return {
        "x": _tuple(x),
        "y": _tuple(y),
        "open_valued": opn,
        "internal_points": internal,
        "lsc": lsc,
        "relation_lsc": rel,
        "lower_midpoint": lower,
        "upper_midpoint": upper,
        "implications": imp,
        "converse_failures": converse,
    }


def sample_domain(box, n):
    """``n`` points per axis on the closed box, lexicographic order."""
    box = _as_box(box)
    axes = [np.linspace(l, h, n) for l, h in zip(box.lo, box.hi)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, box.dim)


# ---------------------------------------------------------------------------
# piecewise 1-D tables


@dataclass(frozen=True)
class Piece:
    """On ``x`` in the interval ``[a, b]`` (ends optionally open) the value is
    the interval from ``lo(x)`` to ``hi(x)`` with the given strictness, or
    empty when ``empty`` is set.  Bounds are numbers or expressions in ``x``.
    """

    a: float
    b: float
    a_open: bool = False
    b_open: bool = False
    lo: object = None
    hi: object = None
    lo_open: bool = False
    hi_open: bool = False
    empty: bool = False

    def covers(self, x):
        left = x > self.a if self.a_open else x >= self.a
        right = x < self.b if self.b_open else x <= self.b
        return left and right

    def to_dict(self):
        d = {"x": [self.a, self.b], "x_open": [self.a_open, self.b_open]}
        if self.empty:
            d["value"] = "empty"
        else:
            d["value"] = {"lo": _bound_source(self.lo), "hi": _bound_source(self.hi),
                          "lo_open": self.lo_open, "hi_open": self.hi_open}
        return d


def _bound_source(b):
    return b if isinstance(b, (int, float, str)) else repr(b)


def _bound_fn(b):
    from .expressions import parse_expression

    if isinstance(b, (int, float)):
        v = float(b)
        return lambda x: v
    if isinstance(b, str) and b.strip() in ("x", "x1"):
        return lambda x: x
    if isinstance(b, str):
        expr = parse_expression(b)
        bad = expr.variables - {"x", "x1"}
        if bad:
            raise ValueError(f"piecewise bounds may only use x, got {sorted(bad)}")
        return lambda x: float(expr({"x": x, "x1": x}))
    if callable(b):
        return b
    raise TypeError(f"unsupported bound {b!r}")


def piecewise_map(pieces, domain=(0.0, 1.0), name="piecewise"):
    """1-D preference map from a table of :class:`Piece` rows.

    The first piece covering ``x`` wins; ``x`` covered by no piece is an
    error at evaluation time.
    """
    pieces = tuple(pieces)
    box = _as_box(([domain[0]], [domain[1]]))
    fns = [(p, None if p.empty else _bound_fn(p.lo), None if p.empty else _bound_fn(p.hi)) for p in pieces]

    def func(x, y):
        t = float(x[0])
        for p, lo, hi in fns:
            if p.covers(t):
                if p.empty:
                    return cg.Empty(1)
                return cg.interval(lo(t), hi(t), p.lo_open, p.hi_open)
        raise OutOfDomainError(f"no piece of {name} covers x = {t}")

    P = PreferenceMap(func, box, name=name, spec={"kind": "piecewise", "domain": list(domain),
                                                  "pieces": [p.to_dict() for p in pieces]})
    P.pieces = pieces
    return P
