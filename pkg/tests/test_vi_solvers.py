import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from prefgames import convex_geometry as cg
from prefgames import fixtures
from prefgames.exceptions import MalformedProblemError, NonConvergenceError, UnsupportedRegionError
from prefgames.reformulation import game_qvi, preference_vi
from prefgames.vi_solvers import (
    BlockSet,
    QVIProblem,
    VIProblem,
    solve_qvi_fixed_point,
    solve_qvi_grid,
    solve_vi_grid,
    verify_solution,
)

UNIT = cg.interval([0.0], [1.0])
SQUARE = cg.interval([0.0, 0.0], [1.0, 1.0])


def const_operator(gens):
    T = cg.CompactConvexSet(len(gens[0]), gens)
    return lambda x: T


def dual_residual(G, V, x):
    """min over mixtures y of the vertices of max_g <g, y - x> (scipy)."""
    M = (V - x) @ G.T  # (m, k)
    m, k = M.shape
    c = np.r_[np.zeros(m), 1.0]
    A = np.hstack([M.T, -np.ones((k, 1))])
    res = linprog(c, A_ub=A, b_ub=np.zeros(k), A_eq=np.r_[np.ones(m), 0.0][None, :], b_eq=[1.0],
                  bounds=[(0, None)] * m + [(None, None)], method="highs")
    return res.fun


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=2, max_size=4),
       st.tuples(st.floats(0, 1), st.floats(0, 1)))
def test_residual_matches_minimax_dual(gens, x):
    G = np.array(gens)
    if np.any(np.linalg.norm(G, axis=1) < 1e-3):
        return
    prob = VIProblem(const_operator(G), SQUARE)
    cert = verify_solution(prob, x)
    assert cert.residual == pytest.approx(dual_residual(G, SQUARE.vertices(), np.asarray(x)), abs=1e-7)


def test_verify_example_3_1():
    P = fixtures.example_3_1()
    prob = preference_vi(P, UNIT)
    good = verify_solution(prob, [0.5])
    assert good.verified and good.residual == 0.0
    bad = verify_solution(prob, [0.25])
    assert not bad.verified
    assert bad.residual == pytest.approx(-0.75)
    assert bad.details["witness_direction"] == [0.75]


def test_verify_with_given_multiplier():
    prob = VIProblem(const_operator([[1.0]]), UNIT)
    assert verify_solution(prob, [0.0], multiplier=[1.0]).verified
    # a multiplier outside T(x) is refused
    assert not verify_solution(prob, [0.0], multiplier=[2.0]).verified


def test_verify_infeasible_point():
    prob = VIProblem(const_operator([[1.0]]), cg.interval([0.2], [0.8]))
    cert = verify_solution(prob, [0.1])
    assert not cert.feasible and not cert.verified


def test_ball_feasible_set_unsupported():
    prob = VIProblem(const_operator([[1.0, 0.0]]), cg.ball([0.5, 0.5], 0.5))
    with pytest.raises(UnsupportedRegionError):
        verify_solution(prob, [0.5, 0.5])


def test_operator_without_generators_is_malformed():
    class Bad:
        unit_ball = False
        generators = np.zeros((0, 1))
        dim = 1

    prob = VIProblem(lambda x: BlockSet([cg.CompactConvexSet(1, [[1.0]])]), UNIT)
    assert verify_solution(prob, [0.0]).verified
    prob_bad = VIProblem(lambda x: BlockSet([Bad()]), UNIT)
    with pytest.raises(MalformedProblemError):
        verify_solution(prob_bad, [0.0])


def test_grid_solver_example_3_1():
    out = solve_vi_grid(preference_vi(fixtures.example_3_1(), UNIT), grid=2001)
    assert [float(p[0]) for p in out.points] == [0.5]


def test_grid_solver_trivial_operators():
    assert [p[0] for p in solve_vi_grid(VIProblem(const_operator([[1.0]]), UNIT), grid=11).points] == [0.0]
    assert len(solve_vi_grid(VIProblem(lambda x: cg.CompactConvexSet(1, unit_ball=True), UNIT), grid=11)) == 11


def test_grid_solver_linear_operator_2d():
    # T = {(1, 1)}: the solution is the lower-left corner
    out = solve_vi_grid(VIProblem(const_operator([[1.0, 1.0]]), SQUARE), grid=11)
    assert [p.tolist() for p in out.points] == [[0.0, 0.0]]


@pytest.mark.parametrize("lam", [0.1, 1.0, 10.0])
def test_verdicts_scale_invariant(lam):
    prob = preference_vi(fixtures.kinked_peak_map(np.linspace(0, 1, 41)[14], 0.2, 1.0), UNIT)
    base = [p[0] for p in solve_vi_grid(prob, grid=41).points]
    scaled = [p[0] for p in solve_vi_grid(prob, grid=41, scale=lam).points]
    assert base and base == scaled


def test_qvi_grid_moving_constraint():
    out = solve_qvi_grid(game_qvi(fixtures.moving_constraint_game()), grid=21)
    assert [p.tolist() for p in out.points] == [[0.5, 0.5]]


def test_fixed_point_example_3_1_with_moving_set():
    P = fixtures.example_3_1()
    prob = QVIProblem(preference_vi(P, UNIT).operator, lambda x: cg.interval([x[0] / 2], [1.0]), UNIT)
    cert = solve_qvi_fixed_point(prob, [0.9])
    assert cert.verified
    assert cert.x[0] == pytest.approx(0.5, abs=1e-6)
    assert cert.method == "fixed-point"


def test_fixed_point_quadratic_game():
    cert = solve_qvi_fixed_point(game_qvi(fixtures.quadratic_game()), [0.2, 0.9], trace=True)
    assert cert.verified
    assert abs(cert.x[0] - cert.x[1]) < 1e-6
    assert cert.trace and cert.trace[0]["iter"] == 0


def test_fixed_point_nonconvergence_carries_trace():
    prob = preference_vi(fixtures.example_3_1(), UNIT)
    with pytest.raises(NonConvergenceError) as info:
        solve_qvi_fixed_point(QVIProblem(prob.operator, prob.constraint, UNIT), [0.9], max_iters=3, trace=True)
    assert len(info.value.trace) == 3


def test_certificates_reverify_at_finer_tolerance():
    out = solve_qvi_grid(game_qvi(fixtures.quadratic_game()), grid=11, tol=1e-9)
    prob = game_qvi(fixtures.quadratic_game())
    assert len(out) == 11
    for c in out:
        assert verify_solution(prob, c.x, tol=1e-10).verified


AXIS21 = np.linspace(0, 1, 21)  # peaks taken from the grid axis so they compare equal


@pytest.mark.parametrize("P", [fixtures.example_3_1(), fixtures.single_peaked_map(AXIS21[6]),
                               fixtures.open_ball_map([AXIS21[6], AXIS21[12]])], ids=["ex1", "peak", "disc"])
def test_fixed_point_lands_in_grid_cluster(P):
    K = P.domain
    prob = preference_vi(P, K)
    grid = 21
    sols = solve_vi_grid(prob, grid).points
    assert sols
    spacing = float(np.max(K.hi - K.lo)) / (grid - 1)
    qvi = QVIProblem(prob.operator, lambda x: K, K)
    rng = np.random.default_rng(7)
    hits = 0
    for _ in range(10):
        try:
            cert = solve_qvi_fixed_point(qvi, rng.uniform(K.lo, K.hi))
        except NonConvergenceError:
            continue
        hits += cert.verified and min(np.max(np.abs(cert.x - s)) for s in sols) <= spacing
    assert hits >= 8
