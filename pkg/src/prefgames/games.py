"""Generalized games: constraint maps, equilibrium and maximality checks,
and brute-force grid oracles.

A profile ``x`` concatenates the players' blocks.  Player ``nu`` sees
``P_nu(x_nu, x_-nu)`` where ``x_-nu`` concatenates the other blocks in
player order (single-player games pass no rival point).

Overlap tests run inside the player's strategy box and a witness has to
beat the tolerance on every face that cuts the box, so a larger tolerance
only ever adds equilibria; see :func:`convex_geometry.relative_overlap`.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import convex_geometry as cg
from ._validation import check_point, check_tol
from .exceptions import DimensionMismatchError, InfeasiblePointError, PreconditionError

__all__ = [
    "ConstantConstraint",
    "AffineBoxConstraint",
    "Player",
    "GameInstance",
    "MaximalityReport",
    "EquilibriumReport",
    "is_maximal",
    "is_equilibrium",
    "brute_force_equilibria",
    "cluster_representatives",
    "grid_axes",
    "gnep_best_response_check",
]

MAX_BRUTE_DIM = 3


class ConstantConstraint:
    """``K(x) = region`` for every profile."""

    kind = "constant"

    def __init__(self, region):
        self.region = region

    def __call__(self, x):
        return self.region

    def to_dict(self):
        return {"kind": self.kind, "region": self.region.to_dict()}

    def __repr__(self):
        return f"ConstantConstraint({self.region!r})"


class AffineBoxConstraint:
    """``K(x) = [L x + l0, U x + u0]`` clipped to the strategy box.

    Returns :class:`Empty` where the clipped bounds cross; the audit
    reports such profiles.
    """

    kind = "affine-box"

    def __init__(self, box, L, l0, U, u0):
        self.box = box
        n = box.dim
        self.L = np.atleast_2d(np.asarray(L, float))
        self.U = np.atleast_2d(np.asarray(U, float))
        self.l0 = np.asarray(l0, float).reshape(n)
        self.u0 = np.asarray(u0, float).reshape(n)
        if self.L.shape[0] != n or self.U.shape != self.L.shape:
            raise DimensionMismatchError("L and U need one row per own coordinate")
        self.profile_dim = self.L.shape[1]

    def bounds(self, x):
        x = np.asarray(x, float)
        lo = np.clip(self.L @ x + self.l0, self.box.lo, self.box.hi)
        hi = np.clip(self.U @ x + self.u0, self.box.lo, self.box.hi)
        return lo, hi

    def __call__(self, x):
        lo, hi = self.bounds(x)
        return cg.interval(lo, hi)

    def to_dict(self):
        return {"kind": self.kind, "L": self.L.tolist(), "l0": self.l0.tolist(),
                "U": self.U.tolist(), "u0": self.u0.tolist()}

    def __repr__(self):
        return f"AffineBoxConstraint(L={self.L.tolist()}, l0={self.l0.tolist()}, U={self.U.tolist()}, u0={self.u0.tolist()})"


@dataclass
class Player:
    box: cg.IntervalProduct
    constraint: object
    preference: object
    name: str = ""

    @property
    def own_dim(self):
        return self.box.dim


class GameInstance:
    """Players ``(C_nu, K_nu, P_nu)`` acting on the product of their boxes."""

    def __init__(self, players, name="game"):
        self.players = list(players)
        self.name = name
        if not self.players:
            raise ValueError("a game needs at least one player")
        dims = [p.own_dim for p in self.players]
        self.offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)
        self.total_dim = int(self.offsets[-1])
        for i, p in enumerate(self.players):
            P = p.preference
            if P.own_dim != p.own_dim:
                raise DimensionMismatchError(f"player {i}: preference acts on dimension {P.own_dim}")
            expected = self.total_dim - p.own_dim
            if P.rival_dim != expected:
                raise DimensionMismatchError(f"player {i}: preference expects {P.rival_dim} rival coordinates, "
                                             f"the game supplies {expected}")
            if isinstance(p.constraint, AffineBoxConstraint) and p.constraint.profile_dim != self.total_dim:
                raise DimensionMismatchError(f"player {i}: constraint acts on {p.constraint.profile_dim} coordinates")
        self.box = cg.IntervalProduct(np.concatenate([p.box.lo for p in self.players]),
                                      np.concatenate([p.box.hi for p in self.players]))

    @property
    def n_players(self):
        return len(self.players)

    def check_profile(self, x):
        return check_point(x, self.total_dim, "profile")

    def block(self, x, i):
        return x[self.offsets[i]:self.offsets[i + 1]]

    def rivals(self, x, i):
        if self.n_players == 1:
            return None
        return np.concatenate([x[: self.offsets[i]], x[self.offsets[i + 1]:]])

    def constraint_value(self, i, x):
        return self.players[i].constraint(x)

    def preference_value(self, i, x):
        return self.players[i].preference(self.block(x, i), self.rivals(x, i))

    def __repr__(self):
        return f"GameInstance({self.name!r}, players={self.n_players}, dim={self.total_dim})"


# ---------------------------------------------------------------------------
# verification


@dataclass
class MaximalityReport:
    point: np.ndarray
    maximal: bool
    witness: np.ndarray = None
    tol: float = 0.0
    method: str = ""

    def __bool__(self):
        return self.maximal

    def to_dict(self):
        return {"point": self.point.tolist(), "maximal": self.maximal, "tol": self.tol, "method": self.method,
                "witness": None if self.witness is None else self.witness.tolist()}


def is_maximal(P, K, x_bar, tol=1e-9):
    """Is ``x_bar`` a maximal element of ``P`` on ``K`` (``P(x_bar) & K`` empty)?

    Raises InfeasiblePointError when ``x_bar`` is not in ``K`` at ``tol``.
    """
    tol = check_tol(tol)
    x_bar = check_point(x_bar, P.own_dim, "x_bar")
    if not K.contains(x_bar, tol):
        raise InfeasiblePointError(f"x_bar = {x_bar} is not in K")
    d = cg.relative_overlap(P(x_bar), K, P.domain, tol)
    return MaximalityReport(x_bar, d.disjoint, d.witness, tol, d.method)


@dataclass
class EquilibriumReport:
    point: np.ndarray
    feasible_per_player: list
    disjoint_per_player: list
    witnesses: list = field(default_factory=list)
    tol: float = 0.0

    @property
    def verdict(self):
        return all(self.feasible_per_player) and all(self.disjoint_per_player)

    def __bool__(self):
        return self.verdict

    def to_dict(self):
        return {
            "point": self.point.tolist(),
            "feasible_per_player": [bool(v) for v in self.feasible_per_player],
            "disjoint_per_player": [bool(v) for v in self.disjoint_per_player],
            "witnesses": [None if w is None else w.tolist() for w in self.witnesses],
            "tol": self.tol,
            "verdict": self.verdict,
        }


def is_equilibrium(G, x_bar, tol=1e-9):
    """Feasibility ``x_nu in K_nu(x)`` (closed, at ``tol``) and disjointness
    ``P_nu(x) & K_nu(x) = {}`` (witnesses must beat ``tol``) for every player."""
    tol = check_tol(tol)
    x = G.check_profile(x_bar)
    feas, disj, wit = [], [], []
    for i, p in enumerate(G.players):
        K = G.constraint_value(i, x)
        xi = G.block(x, i)
        feas.append(bool(not K.is_empty and K.contains(xi, tol)))
        if K.is_empty:
            disj.append(True)
            wit.append(None)
            continue
        d = cg.relative_overlap(G.preference_value(i, x), K, p.box, tol)
        disj.append(d.disjoint)
        wit.append(d.witness)
    return EquilibriumReport(x, feas, disj, wit, tol)


# ---------------------------------------------------------------------------
# grid oracles


def grid_axes(box, n):
    """``n`` evenly spaced points per axis of ``box`` (one point on flat axes)."""
    return [np.linspace(l, h, n) if h > l else np.array([l]) for l, h in zip(box.lo, box.hi)]


def _spacing(box, n):
    w = box.hi - box.lo
    return float(np.max(w)) / (n - 1)


def brute_force_equilibria(G, grid=101, tol=None, max_count=None):
    """All grid profiles passing :func:`is_equilibrium`, lexicographic order.

    ``tol`` defaults to 1.5 grid spacings.  ``max_count`` stops the scan
    early once that many equilibria are found.
    """
    if G.total_dim > MAX_BRUTE_DIM:
        raise PreconditionError(f"brute force supports total dimension <= {MAX_BRUTE_DIM}, got {G.total_dim}")
    if int(grid) < 11:
        raise PreconditionError("brute force needs at least 11 grid points per axis")
    grid = int(grid)
    if tol is None:
        tol = 1.5 * _spacing(G.box, grid)
    found = []
    for pt in itertools.product(*grid_axes(G.box, grid)):
        x = np.array(pt)
        if is_equilibrium(G, x, tol).verdict:
            found.append(x)
            if max_count is not None and len(found) >= max_count:
                break
    return found


def cluster_representatives(points, spacing):
    """Lexicographically smallest point of every cluster of grid-adjacent
    points (Chebyshev distance at most one spacing)."""
    pts = [np.asarray(p, float) for p in points]
    if not pts:
        return []
    X = np.array(pts)
    n = len(X)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    order = np.lexsort(X.T[::-1])
    X = X[order]
    lim = spacing * (1 + 1e-9)
    for i in range(n):
        for j in range(i + 1, n):
            if X[j, 0] - X[i, 0] > lim:
                break
            if np.max(np.abs(X[j] - X[i])) <= lim:
                parent[find(j)] = find(i)
    reps = {}
    for i in range(n):
        reps.setdefault(find(i), X[i])
    out = list(reps.values())
    out.sort(key=lambda p: tuple(p))
    return out


def _grid_in(region, n):
    if isinstance(region, cg.IntervalProduct):
        axes = grid_axes(region, n)
        return np.array(list(itertools.product(*axes)))
    lo, hi = region.bounding_box()
    pts = np.array(list(itertools.product(*grid_axes(cg.IntervalProduct(lo, hi), n))))
    return pts[region.contains_many(pts)]


def gnep_best_response_check(G, x_bar, grid=101, tol=1e-9):
    """Best-response test with utilities: for every player,
    ``u(x_bar) >= max over a grid of K(x_bar) of u(z, x_bar_-nu) - tol``
    and ``x_bar_nu in K(x_bar)``.  Needs utility-backed preferences."""
    x = G.check_profile(x_bar)
    for i, p in enumerate(G.players):
        u = getattr(p.preference, "utility", None)
        if u is None:
            raise PreconditionError(f"player {i} has no utility attached")
        K = G.constraint_value(i, x)
        xi, y = G.block(x, i), G.rivals(x, i)
        if K.is_empty or not K.contains(xi, tol):
            return False
        Z = _grid_in(K, grid)
        best = max(u(z, y) for z in Z)
        if u(xi, y) < best - tol:
            return False
    return True
