"""Named fixtures: the two worked 1-D examples, small games and random fleets.

``get_fixture(name)`` resolves the registry names ``"example-3.1"`` and
``"example-3.2"`` (preference maps on [0, 1]).
"""

from dataclasses import dataclass

import numpy as np

from . import convex_geometry as cg
from ._rng import stage_rng
from .games import AffineBoxConstraint, ConstantConstraint, GameInstance, Player
from .preferences import Piece, PreferenceMap, from_utility, piecewise_map

__all__ = [
    "FIXTURES",
    "get_fixture",
    "example_3_1",
    "example_3_2",
    "example_3_1_utility",
    "example_3_1_from_utility",
    "increasing_utility_map",
    "singleton_map",
    "empty_map",
    "ball_map",
    "single_peaked_map",
    "kinked_peak_map",
    "open_ball_map",
    "open_box_map",
    "lift_map",
    "tracking_map",
    "single_player_game",
    "quadratic_game",
    "moving_constraint_game",
    "empty_game",
    "FleetInstance",
    "random_fleet",
]

UTILITY_3_1 = "(x < 0.5)*x + (x >= 0.5)*(2 - x)"


def example_3_1_utility(x):
    x = np.asarray(x, dtype=float)
    return np.where(x < 0.5, x, 2.0 - x)


def example_3_1():
    """P(x) = (x, 1] on [0, 1/2), empty at 1/2, [1/2, x) on (1/2, 1]."""
    P = piecewise_map(
        [
            Piece(0.0, 0.5, False, True, lo="x", hi=1.0, lo_open=True),
            Piece(0.5, 0.5, empty=True),
            Piece(0.5, 1.0, True, False, lo=0.5, hi="x", hi_open=True),
        ],
        name="example-3.1",
    )
    P.utility = lambda z, y=None: float(example_3_1_utility(np.atleast_1d(z)[0]))
    return P


def example_3_2():
    """P(x) = (x, 1] on [0, 1/2] and [1/2, 3/4] on (1/2, 1]."""
    return piecewise_map(
        [
            Piece(0.0, 0.5, lo="x", hi=1.0, lo_open=True),
            Piece(0.5, 1.0, True, False, lo=0.5, hi=0.75),
        ],
        name="example-3.2",
    )


def example_3_1_from_utility(samples=513):
    return from_utility(example_3_1_utility, ([0.0], [1.0]), name="example-3.1-utility", samples=samples,
                        spec={"kind": "utility", "expr": UTILITY_3_1, "domain": [0.0, 1.0]})


def increasing_utility_map():
    """From u(x) = x on [0, 1]: P(x) = (x, 1], empty at 1."""
    return from_utility(lambda z: np.asarray(z, float), ([0.0], [1.0]), name="increasing",
                        spec={"kind": "utility", "expr": "x", "domain": [0.0, 1.0]})


def singleton_map(value=1.0):
    return piecewise_map([Piece(0.0, 1.0, lo=value, hi=value)], name="singleton")


def empty_map(dim=1):
    box = cg.IntervalProduct(np.zeros(dim), np.ones(dim))
    return PreferenceMap(lambda x, y: cg.Empty(dim), box, name="empty", utility=lambda z, y=None: 0.0,
                         spec={"kind": "builtin", "name": "empty", "dim": dim})


def ball_map(center=(1.0, 0.0), radius=0.5):
    """Constant ball-valued map on [0, 1]^2 (not a preference of a point in it)."""
    c = np.asarray(center, float)
    box = cg.IntervalProduct([0.0, 0.0], [1.0, 1.0])
    return PreferenceMap(lambda x, y: cg.Ball(c, radius, open=True), box, name="ball")


FIXTURES = {
    "example-3.1": example_3_1,
    "example-3.2": example_3_2,
    "example-3.1-utility": example_3_1_from_utility,
    "increasing": increasing_utility_map,
    "empty": empty_map,
}


def get_fixture(name):
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {sorted(FIXTURES)}") from None


# ---------------------------------------------------------------------------
# closed-form families used by the randomized fleets.  Each map also carries
# its utility so best-response cross-checks apply.


def single_peaked_map(peak, lo=0.0, hi=1.0):
    """u(z) = -|z - peak|: P(x) is the open interval of points closer to the
    peak, clipped to the domain (a clipped end at the domain edge is closed)."""
    peak = float(peak)

    def func(x, y):
        t = float(x[0])
        if t == peak:
            return cg.Empty(1)
        # the end through x is x itself, so rounding never puts x inside
        a, b = (2 * peak - t, t) if t > peak else (t, 2 * peak - t)
        return cg.interval(max(a, lo), min(b, hi), a >= lo, b <= hi)

    return PreferenceMap(func, ([lo], [hi]), name=f"single-peaked({peak:g})",
                         utility=lambda z, y=None: -abs(float(np.atleast_1d(z)[0]) - peak),
                         spec={"kind": "builtin", "name": "single-peaked", "peak": peak})


def kinked_peak_map(peak, jump, slope, lo=0.0, hi=1.0):
    """Generalises the first worked example: u(z) = z - peak below the peak
    and jump - slope (z - peak) from the peak on, with jump > 0, slope > 0."""
    peak, jump, slope = float(peak), float(jump), float(slope)

    def u(z):
        return (z - peak) if z < peak else jump - slope * (z - peak)

    def func(x, y):
        t = float(x[0])
        ut = u(t)
        if t == peak:
            return cg.Empty(1)
        if t < peak:
            # better: (t, peak) and [peak, peak + (jump - ut)/slope)
            r = peak + (jump - ut) / slope
            return cg.interval(t, min(r, hi), True, r <= hi)
        # ut = jump - slope (t - peak) < jump: better [peak, t) plus the part below peak with z - peak > ut
        left = peak + ut
        if ut >= 0:
            return cg.interval(peak, t, False, True)
        return cg.interval(max(left, lo), t, left >= lo, True)

    return PreferenceMap(func, ([lo], [hi]), name=f"kinked({peak:g},{jump:g},{slope:g})",
                         utility=lambda z, y=None: float(u(float(np.atleast_1d(z)[0]))),
                         spec={"kind": "builtin", "name": "kinked-peak", "peak": peak, "jump": jump, "slope": slope})


def open_ball_map(peak, lo=(0.0, 0.0), hi=(1.0, 1.0)):
    """u(z) = -|z - peak|_2 in 2-D: P(x) is the open disc through x about the peak."""
    p = np.asarray(peak, float)

    def func(x, y):
        r = float(np.linalg.norm(x - p))
        return cg.Empty(p.size) if r == 0.0 else cg.Ball(p, r, open=True)

    return PreferenceMap(func, (lo, hi), name="open-ball",
                         utility=lambda z, y=None: -float(np.linalg.norm(np.asarray(z, float) - p)),
                         spec={"kind": "builtin", "name": "open-ball", "peak": p.tolist()})


def open_box_map(peak, lo=(0.0, 0.0), hi=(1.0, 1.0)):
    """u(z) = -|z - peak|_inf: P(x) is the open box through x about the peak,
    clipped to the domain (clipped faces on the domain boundary are closed)."""
    p = np.asarray(peak, float)
    lo_a, hi_a = np.asarray(lo, float), np.asarray(hi, float)

    def func(x, y):
        r = float(np.max(np.abs(x - p)))
        if r == 0.0:
            return cg.Empty(p.size)
        a, b = p - r, p + r
        # faces through x take x's coordinate exactly
        on = np.abs(x - p) == r
        a = np.where(on & (x < p), x, a)
        b = np.where(on & (x > p), x, b)
        return cg.interval(np.maximum(a, lo_a), np.minimum(b, hi_a), a >= lo_a, b <= hi_a)

    return PreferenceMap(func, (lo, hi), name="open-box",
                         utility=lambda z, y=None: -float(np.max(np.abs(np.asarray(z, float) - p))),
                         spec={"kind": "builtin", "name": "open-box", "peak": p.tolist()})


# ---------------------------------------------------------------------------
# games


def lift_map(P, rival_domain):
    """``P`` as a parametric map that ignores the rival point."""
    base_u = P.utility
    util = None if base_u is None else (lambda z, y=None: base_u(z))
    return PreferenceMap(lambda x, y: P(x), P.domain, rival_domain, name=P.name, utility=util,
                         spec={"kind": "lifted", "base": P.spec})


def tracking_map(lo=0.0, hi=1.0):
    """u(z, y) = -(z - y)^2 on [lo, hi]: P(x, y) is the open interval about
    the rival point y through x, clipped to the domain."""

    def func(x, y):
        c, t = float(y[0]), float(x[0])
        if t == c:
            return cg.Empty(1)
        a, b = (2 * c - t, t) if t > c else (t, 2 * c - t)
        return cg.interval(max(a, lo), min(b, hi), a >= lo, b <= hi)

    return PreferenceMap(func, ([lo], [hi]), ([lo], [hi]), name="tracking",
                         utility=lambda z, y: -(float(np.atleast_1d(z)[0]) - float(np.atleast_1d(y)[0])) ** 2,
                         spec={"kind": "builtin", "name": "tracking"})


def single_player_game(P, K=None, name=None):
    K = P.domain if K is None else K
    return GameInstance([Player(P.domain, ConstantConstraint(K), P, "p1")], name=name or P.name)


def quadratic_game():
    """Two players on [0, 1], u_nu = -(x_nu - x_-nu)^2, K_nu = [0, 1]."""
    box = cg.IntervalProduct([0.0], [1.0])
    return GameInstance([Player(box, ConstantConstraint(box), tracking_map(), f"p{i + 1}") for i in range(2)],
                        name="quadratic")


def moving_constraint_game():
    """K_1(x) = [x_2 / 2, 1], K_2 = [0, 1]; both players hold the first
    worked example's preference, which is empty only at 1/2."""
    box = cg.IntervalProduct([0.0], [1.0])
    K1 = AffineBoxConstraint(box, [[0.0, 0.5]], [0.0], [[0.0, 0.0]], [1.0])
    players = [Player(box, K1, lift_map(example_3_1(), box), "p1"),
               Player(box, ConstantConstraint(box), lift_map(example_3_1(), box), "p2")]
    return GameInstance(players, name="moving-constraint")


def empty_game(n_players=2):
    box = cg.IntervalProduct([0.0], [1.0])
    rival = cg.IntervalProduct(np.zeros(n_players - 1), np.ones(n_players - 1)) if n_players > 1 else None
    players = []
    for i in range(n_players):
        P = empty_map(1) if rival is None else lift_map(empty_map(1), rival)
        players.append(Player(box, ConstantConstraint(box), P, f"p{i + 1}"))
    return GameInstance(players, name="empty")


# ---------------------------------------------------------------------------
# randomized fleets


@dataclass
class FleetInstance:
    """A maximal-element problem ``(P, K)`` whose peak and feasible box sit
    on a lattice the solver grid ``grid`` contains."""

    name: str
    kind: str
    preference: PreferenceMap
    feasible: cg.IntervalProduct
    grid: int

    @property
    def game(self):
        return single_player_game(self.preference, self.feasible, self.name)


FLEET_KINDS = ("single-peaked", "kinked-peak", "open-ball", "open-box")


def _lattice_interval(rng, steps, min_len=1):
    a = int(rng.integers(0, steps - min_len + 1))
    b = int(rng.integers(a + min_len, steps + 1))
    return a, b


def _snap_to_axis(k, a, b, step, h):
    """Lattice value ``k h``, taken from the solver's grid axis over
    ``[a h, b h]`` when it lies inside so the two compare equal."""
    if a <= k <= b:
        axis = np.linspace(a * h, b * h, (b - a) * step + 1)
        return float(axis[(k - a) * step])
    return k * h


def random_fleet(n=100, seed=0, lattice=20):
    """``n`` instances cycling through the closed-form families.

    1-D: single-peaked or kinked utility, ``K`` a closed sub-interval with
    lattice endpoints, grid spacing half a lattice cell.  2-D: open disc or
    open box about a lattice peak, ``K`` a closed square with lattice
    corners, grid spacing one lattice cell.  Every instance is irreflexive,
    convex-valued and mid-point continuous, and ``K`` is compact.
    """
    rng = stage_rng(seed, "fleet")
    out = []
    h = 1.0 / lattice
    for i in range(n):
        kind = FLEET_KINDS[i % len(FLEET_KINDS)]
        if kind in ("single-peaked", "kinked-peak"):
            k = int(rng.integers(0, lattice + 1))
            a, b = _lattice_interval(rng, lattice)
            peak = _snap_to_axis(k, a, b, 2, h)
            K = cg.interval([a * h], [b * h])
            grid = 2 * (b - a) + 1
            if kind == "single-peaked":
                P = single_peaked_map(peak)
            else:
                jump = float(rng.choice([0.1, 0.2, 0.3]))
                slope = float(rng.choice([0.5, 1.0, 2.0]))
                P = kinked_peak_map(peak, jump, slope)
        else:
            ks = rng.integers(0, lattice + 1, size=2)
            w = int(rng.integers(lattice // 4, lattice + 1))
            corner = rng.integers(0, lattice - w + 1, size=2)
            peak = np.array([_snap_to_axis(int(k), int(c), int(c) + w, 1, h) for k, c in zip(ks, corner)])
            K = cg.interval(corner * h, (corner + w) * h)
            grid = w + 1
            P = open_ball_map(peak) if kind == "open-ball" else open_box_map(peak)
        out.append(FleetInstance(f"fleet-{i:03d}-{kind}", kind, P, K, grid))
    return out
