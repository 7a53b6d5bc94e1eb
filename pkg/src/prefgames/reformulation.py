"""Variational reformulation pipelines.

``maximal_via_vi`` solves VI(F, K) for one preference map and checks each
verified solution for maximality; ``equilibrium_via_qvi`` builds the
product operator of a game, solves the QVI and checks each verified
solution with :func:`games.is_equilibrium`.  A verified solution that
fails the downstream check raises :class:`ImplicationFailure`: it would
mean a bug in this package, not a counterexample to the theory.

``audit_assumptions`` samples the standing hypotheses (constraint maps
non-empty, convex, closed, lower semicontinuous and bounded; preferences
irreflexive and mid-point continuous) and records resolution-stamped
verdicts that travel with the pipeline results.
"""

from dataclasses import dataclass, field

import numpy as np

from . import convex_geometry as cg
from ._rng import stage_rng
from .exceptions import NonConvergenceError, PrefGamesError, PropertyViolation
from .games import GameInstance, ConstantConstraint, Player, is_equilibrium, is_maximal
from .normal_cones import f_operator
from .preferences import Resolution, check_irreflexive, check_lower_midpoint, check_upper_midpoint, sample_domain
from .vi_solvers import (
    MAX_GRID_DIM,
    BlockSet,
    QVIProblem,
    VIProblem,
    solve_qvi_fixed_point,
    solve_qvi_grid,
    solve_vi_grid,
)

__all__ = [
    "ImplicationFailure",
    "ProductOperator",
    "preference_vi",
    "game_qvi",
    "PipelineResult",
    "maximal_via_vi",
    "equilibrium_via_qvi",
    "audit_assumptions",
    "audit_preference",
]


class ImplicationFailure(PrefGamesError):
    """A verified VI/QVI solution failed maximality or equilibrium."""


class ProductOperator:
    """``x -> prod_nu F_nu(x_nu, x_-nu)`` as a :class:`BlockSet`."""

    def __init__(self, game, allow_degenerate=False):
        self.game = game
        self.allow_degenerate = allow_degenerate
        self.offsets = game.offsets

    def block_value(self, i, x):
        G = self.game
        return f_operator(G.players[i].preference, G.block(x, i), G.rivals(x, i), self.allow_degenerate)

    def __call__(self, x):
        x = self.game.check_profile(x)
        return BlockSet([self.block_value(i, x) for i in range(self.game.n_players)])


def preference_vi(P, K, allow_degenerate=False):
    """VI(F, K) for a single preference map."""
    return VIProblem(lambda x: f_operator(P, x, None, allow_degenerate), K, name=f"vi({P.name})")


def game_qvi(G, allow_degenerate=False):
    """QVI(F, K) with ``F`` the product operator and ``K = prod K_nu``."""
    return QVIProblem(ProductOperator(G, allow_degenerate),
                      lambda x: [G.constraint_value(i, x) for i in range(G.n_players)],
                      G.box, name=f"qvi({G.name})")


@dataclass
class PipelineResult:
    certificates: list
    reports: list
    audit: dict = None
    skipped: list = field(default_factory=list)
    method: str = "grid"
    status: str = "ok"

    @property
    def points(self):
        return [c.x for c in self.certificates]

    @property
    def x(self):
        return self.certificates[0].x if self.certificates else None

    def to_dict(self):
        return {
            "status": self.status,
            "method": self.method,
            "solutions": [{"certificate": c.to_dict(), "check": r.to_dict()} for c, r in zip(self.certificates, self.reports)],
            "skipped": self.skipped,
            "audit": self.audit,
        }


def audit_preference(P, points, rivals=None, res=None):
    """Irreflexivity and mid-point verdicts of ``P`` at sample points."""
    res = res or Resolution()
    irr = check_irreflexive(P, points, rivals)
    lower_fail, upper_fail = [], []
    for i, x in enumerate(points):
        y = None if rivals is None else rivals[i]
        lo = check_lower_midpoint(P, x, y, res)
        if not lo.holds:
            lower_fail.append(lo.to_dict())
        up = check_upper_midpoint(P, x, y, res)
        if not up.holds:
            upper_fail.append(up.to_dict())
    return {
        "irreflexive": {"passed": not irr, "counterexamples": [_clean_point(b) for b in irr[:5]],
                        "checked": len(points)},
        "lower_midpoint": {"passed": not lower_fail, "counterexamples": lower_fail[:5], "checked": len(points)},
        "upper_midpoint": {"passed": not upper_fail, "counterexamples": upper_fail[:5], "checked": len(points)},
        "convex_values": {"passed": True, "note": "every region kind is convex"},
        "resolution": res.to_dict(),
    }


def _clean_point(b):
    if isinstance(b, tuple):
        return {"x": b[0].tolist(), "y": b[1].tolist()}
    return {"x": b.tolist()}


def _domain_samples(box, n, seed, label):
    pts = sample_domain(box, n)
    rng = stage_rng(seed, label)
    extra = rng.uniform(box.lo, box.hi, size=(max(1, n // 4), box.dim))
    return np.vstack([pts, extra])


def maximal_via_vi(P, K, grid=101, tol=1e-9, res=None, audit_samples=9, seed=0, max_count=None, scale=1.0):
    """Solve VI(F, K) on a grid and check every verified point for maximality.

    Returns a :class:`PipelineResult`; ``status`` is ``"no-solution"`` when
    the grid holds no verified point.
    """
    res = res or Resolution(seed=seed)
    audit = None
    if audit_samples:
        pts = _domain_samples(P.domain, audit_samples, seed, "audit-vi")
        audit = {"preference": audit_preference(P, pts, res=res),
                 "feasible_set": {"non_empty": not K.is_empty, "closed": _closed(K), "bounded": True}}
    out = solve_vi_grid(preference_vi(P, K), grid, tol, max_count=max_count, scale=scale)
    reports = []
    for cert in out:
        rep = is_maximal(P, K, cert.x, tol)
        if not rep.maximal:
            raise ImplicationFailure(f"verified VI solution {cert.x} is not maximal (witness {rep.witness})")
        reports.append(rep)
    status = "ok" if out.certificates else "no-solution"
    return PipelineResult(out.certificates, reports, audit, out.skipped, "grid", status)


def equilibrium_via_qvi(G, grid=101, tol=1e-9, res=None, audit_samples=5, seed=0, starts=10, max_iters=5000,
                        max_count=None, trace=False):
    """Solve QVI(F, K) for the game and check every verified point.

    Grid search at total dimension <= 3, fixed-point iteration from
    ``starts`` seed-derived starting profiles otherwise.
    """
    res = res or Resolution(seed=seed)
    audit = audit_assumptions(G, audit_samples, res, seed) if audit_samples else None
    prob = game_qvi(G)
    skipped = []
    if G.total_dim <= MAX_GRID_DIM:
        out = solve_qvi_grid(prob, grid, tol, max_count=max_count)
        certs, skipped, method = out.certificates, out.skipped, "grid"
    else:
        rng = stage_rng(seed, "qvi-starts")
        certs, method = [], "fixed-point"
        for _ in range(starts):
            x0 = rng.uniform(G.box.lo, G.box.hi)
            try:
                cert = solve_qvi_fixed_point(prob, x0, max_iters=max_iters, tol=tol, trace=trace)
            except (NonConvergenceError, PropertyViolation) as exc:
                skipped.append({"x0": x0.tolist(), "reason": str(exc)})
                continue
            if cert.verified:
                certs.append(cert)
    reports = []
    for cert in certs:
        rep = is_equilibrium(G, cert.x, tol)
        if not rep.verdict:
            raise ImplicationFailure(f"verified QVI solution {cert.x} is not an equilibrium")
        reports.append(rep)
    status = "ok" if certs else "no-solution"
    return PipelineResult(certs, reports, audit, skipped, method, status)


# ---------------------------------------------------------------------------
# hypothesis audit


def _closed(region):
    if region.is_empty:
        return True
    if isinstance(region, cg.IntervalProduct):
        return not (region.lo_open.any() or region.hi_open.any())
    if isinstance(region, cg.HPolytope):
        return not region.strict.any()
    if isinstance(region, cg.Ball):
        return not region.open
    return True


def _dist(region, p):
    if region.is_empty:
        return np.inf
    return float(np.linalg.norm(cg.project(p, region) - p))


def _audit_constraint(G, i, samples, rng, n_seq=4, steps=30):
    K = G.players[i].constraint
    box = G.box
    own_box = G.players[i].box
    report = {name: {"passed": True, "witness": None}
              for name in ("non_empty", "convex_values", "closed_values", "closed_graph", "lsc", "bounded")}

    def fail(name, witness):
        if report[name]["passed"]:
            report[name] = {"passed": False, "witness": witness}

    for x in samples:
        val = K(x)
        if val.is_empty:
            fail("non_empty", {"x": x.tolist()})
            continue
        if not _closed(val):
            fail("closed_values", {"x": x.tolist(), "value": repr(val)})
        Z = val.sample(8, rng)
        if len(Z) >= 2:
            for a, b in zip(Z[:-1], Z[1:]):
                if not val.contains(0.5 * (a + b), 1e-9):
                    fail("convex_values", {"x": x.tolist(), "a": a.tolist(), "b": b.tolist()})
        lo, hi = val.bounding_box()
        if np.any(lo < own_box.lo - 1e-9) or np.any(hi > own_box.hi + 1e-9):
            fail("bounded", {"x": x.tolist(), "value": repr(val)})
        # closed graph: z_k = proj of a fixed point onto K(x_k), x_k -> x
        for _ in range(n_seq):
            d = rng.normal(size=box.dim)
            d /= np.linalg.norm(d)
            q = rng.uniform(own_box.lo, own_box.hi)
            z = None
            for k in range(steps):
                xk = np.clip(x + 0.1 * 2.0 ** -k * d, box.lo, box.hi)
                vk = K(xk)
                if vk.is_empty:
                    break
                z = cg.project(q, vk)
            if z is not None and not val.contains(z, 1e-6):
                fail("closed_graph", {"x": x.tolist(), "limit": z.tolist()})
        # lsc: points of K(x) stay close to K(x') for x' near x
        for z in Z[:3]:
            for rho in (0.2, 0.05, 0.01):
                ok = False
                for delta in (0.1, 0.01, 0.001, 1e-4):
                    nbrs = np.clip(x + delta * rng.uniform(-1, 1, size=(8, box.dim)), box.lo, box.hi)
                    if all(_dist(K(xp), z) < rho for xp in nbrs):
                        ok = True
                        break
                if not ok:
                    fail("lsc", {"x": x.tolist(), "z": z.tolist(), "rho": rho})
    return report


def audit_assumptions(G, samples=5, res=None, seed=0, include_preferences=True):
    """Sampled pass/fail verdicts per hypothesis and player.

    Constraint hypotheses: non-empty, convex and closed values, closed
    graph, lower semicontinuity and values inside the strategy box
    (hence a relatively compact range).  Preference hypotheses:
    irreflexivity and lower/upper mid-point continuity; with
    ``include_preferences=False`` they are skipped and reported as
    unchecked (``preferences_passed`` is None).
    """
    res = res or Resolution(seed=seed)
    rng = stage_rng(seed, "audit")
    profiles = _domain_samples(G.box, samples, seed, "audit-profiles")
    players = []
    for i, p in enumerate(G.players):
        cons = _audit_constraint(G, i, profiles, rng)
        pref = None
        if include_preferences:
            own = [G.block(x, i) for x in profiles]
            riv = None if G.n_players == 1 else [G.rivals(x, i) for x in profiles]
            pref = audit_preference(p.preference, own, riv, res)
        players.append({"name": p.name, "constraint": cons, "preference": pref})
    constraint_ok = all(all(v["passed"] for v in pl["constraint"].values()) for pl in players)
    pref_ok = None
    if include_preferences:
        pref_ok = all(pl["preference"][k]["passed"] for pl in players
                      for k in ("irreflexive", "lower_midpoint", "upper_midpoint"))
    return {
        "players": players,
        "compact": all(pl["constraint"]["bounded"]["passed"] and pl["constraint"]["closed_values"]["passed"]
                       for pl in players),
        "constraints_passed": constraint_ok,
        "preferences_passed": pref_ok,
        "hypotheses_verified": bool(constraint_ok and pref_ok),
        "samples": int(len(profiles)),
        "resolution": res.to_dict(),
    }
