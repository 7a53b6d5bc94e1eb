import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prefgames import convex_geometry as cg
from prefgames import fixtures
from prefgames.exceptions import DimensionMismatchError, InfeasiblePointError, PreconditionError
from prefgames.games import (
    AffineBoxConstraint,
    ConstantConstraint,
    GameInstance,
    Player,
    brute_force_equilibria,
    cluster_representatives,
    gnep_best_response_check,
    grid_axes,
    is_equilibrium,
    is_maximal,
)

UNIT = cg.interval([0.0], [1.0])


def test_is_maximal_example_3_1():
    P = fixtures.example_3_1()
    assert is_maximal(P, UNIT, [0.5]).maximal
    rep = is_maximal(P, UNIT, [0.25])
    assert not rep.maximal
    assert P([0.25]).contains(rep.witness)


def test_is_maximal_needs_feasible_point():
    with pytest.raises(InfeasiblePointError):
        is_maximal(fixtures.example_3_1(), cg.interval([0.6], [1.0]), [0.5])


def test_maximal_on_subinterval_is_closest_to_peak():
    P = fixtures.single_peaked_map(0.2)
    K = cg.interval([0.5], [0.9])
    assert is_maximal(P, K, [0.5]).maximal
    assert not is_maximal(P, K, [0.6]).maximal


def test_equilibrium_quadratic_game():
    G = fixtures.quadratic_game()
    assert is_equilibrium(G, [0.3, 0.3]).verdict
    rep = is_equilibrium(G, [0.2, 0.8])
    assert not rep.verdict
    assert rep.disjoint_per_player == [False, False]


def test_equilibrium_moving_constraint_feasibility():
    G = fixtures.moving_constraint_game()
    rep = is_equilibrium(G, [0.3, 0.8])
    # K_1 = [0.4, 1] does not contain 0.3
    assert rep.feasible_per_player == [False, True]
    assert is_equilibrium(G, [0.5, 0.5]).verdict


def test_brute_force_quadratic_band():
    G = fixtures.quadratic_game()
    grid = 21
    h = 1.0 / (grid - 1)
    found = brute_force_equilibria(G, grid)
    expected = [(a, b) for a in grid_axes(G.box, grid)[0] for b in grid_axes(G.box, grid)[1] if abs(a - b) <= h + 1e-12]
    assert sorted(map(tuple, found)) == sorted(expected)


def test_equilibria_agree_with_best_responses():
    # set-valued check against the utility oracle on the quadratic game
    G = fixtures.quadratic_game()
    for x in ([0.4, 0.4], [0.1, 0.9], [1.0, 1.0], [0.0, 0.2]):
        assert is_equilibrium(G, x, tol=1e-9).verdict == gnep_best_response_check(G, x, grid=201, tol=1e-9)


def test_best_response_needs_utilities():
    P = fixtures.example_3_1()
    P.utility = None
    with pytest.raises(PreconditionError):
        gnep_best_response_check(fixtures.single_player_game(P), [0.5])


def test_brute_force_limits():
    with pytest.raises(PreconditionError):
        brute_force_equilibria(fixtures.quadratic_game(), grid=5)


def test_brute_force_max_count_stops_early():
    assert len(brute_force_equilibria(fixtures.quadratic_game(), 21, max_count=3)) == 3


def test_affine_box_constraint_values():
    K = AffineBoxConstraint(UNIT, [[0.0, 0.5]], [0.0], [[0.0, 0.0]], [1.0])
    v = K([0.3, 0.8])
    assert v.lo[0] == pytest.approx(0.4) and v.hi[0] == pytest.approx(1.0)
    crossing = AffineBoxConstraint(UNIT, [[0.0, 0.0]], [0.8], [[0.0, 0.0]], [0.2])
    assert crossing([0.5, 0.5]).is_empty
    assert K.to_dict()["kind"] == "affine-box"


def test_game_dimension_checks():
    P = fixtures.example_3_1()  # not parametric
    with pytest.raises(DimensionMismatchError):
        GameInstance([Player(UNIT, ConstantConstraint(UNIT), P), Player(UNIT, ConstantConstraint(UNIT), P)])


def test_blocks_and_rivals():
    G = fixtures.quadratic_game()
    x = np.array([0.1, 0.7])
    assert G.block(x, 1).tolist() == [0.7]
    assert G.rivals(x, 1).tolist() == [0.1]
    assert fixtures.single_player_game(fixtures.example_3_1()).rivals(np.array([0.2]), 0) is None


def test_empty_game_everything_is_equilibrium():
    G = fixtures.empty_game(3)
    assert is_equilibrium(G, [0.1, 0.5, 0.9]).verdict


@settings(max_examples=30, deadline=None)
@given(st.sets(st.tuples(st.integers(0, 8), st.integers(0, 8)), min_size=1, max_size=25))
def test_cluster_representatives_are_smallest_of_components(cells):
    pts = [np.array(c, float) * 0.1 for c in cells]
    reps = cluster_representatives(pts, 0.1)
    # one representative per 8-connected component, lexicographically minimal
    remaining = set(cells)
    comps = []
    while remaining:
        stack = [remaining.pop()]
        comp = set(stack)
        while stack:
            a, b = stack.pop()
            for da in (-1, 0, 1):
                for db in (-1, 0, 1):
                    q = (a + da, b + db)
                    if q in remaining:
                        remaining.discard(q)
                        comp.add(q)
                        stack.append(q)
        comps.append(min(comp))
    assert sorted(tuple(np.round(r * 10).astype(int)) for r in reps) == sorted(comps)


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(1e-9, 1e-2), st.floats(1e-9, 1e-2))
def test_equilibrium_set_grows_with_tolerance(a, b, t1, t2):
    G = fixtures.quadratic_game()
    lo, hi = sorted((t1, t2))
    if is_equilibrium(G, [a, b], lo).verdict:
        assert is_equilibrium(G, [a, b], hi).verdict
