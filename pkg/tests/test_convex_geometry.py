import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from prefgames import convex_geometry as cg
from prefgames._lp import lp_solve
from prefgames._minnorm import min_norm_point, project_onto_hull
from prefgames.exceptions import DimensionMismatchError, EmptyRegionError, InfeasibleLPError

coord = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False)


def unit_square(strict=False):
    A = np.array([[1.0, 0], [-1, 0], [0, 1], [0, -1]])
    b = np.array([1.0, 0, 1, 0])
    return cg.hpolytope(A, b, [strict] * 4)


# ---------------------------------------------------------------------------
# membership


def test_interval_open_ends():
    r = cg.interval([0.0], [1.0], True, False)
    assert not r.contains([0.0])
    assert r.contains([1.0])
    assert r.contains([0.5])


def test_tolerance_semantics_closed_vs_strict():
    closed = cg.interval([0.0], [1.0])
    opened = cg.interval([0.0], [1.0], True, True)
    assert closed.contains([-1e-10], tol=1e-9)
    # strict faces need slack beyond tol
    assert not opened.contains([5e-10], tol=1e-9)
    assert opened.contains([2e-9], tol=1e-9)


def test_empty_region():
    e = cg.Empty(2)
    assert e.is_empty
    assert not e.contains([0.0, 0.0])
    assert cg.normal_cone_at(e, [0.3, 0.3]).full_space


def test_ball_membership_and_dim_check():
    b = cg.ball([0.0, 0.0], 1.0, open=True)
    assert b.contains([0.5, 0.5])
    assert not b.contains([1.0, 0.0])
    with pytest.raises(DimensionMismatchError):
        cg.membership(b, [0.0, 0.0, 0.0])


def test_region_dict_round_trip():
    for r in (cg.interval([0, 0], [1, 2], [True, False], [False, True]), unit_square(True),
              cg.ball([0.5, 0.5], 0.25, open=True), cg.Empty(3), cg.VPolytope([[0, 0], [1, 0], [0, 1]])):
        assert cg.region_from_dict(r.to_dict()) == r


# ---------------------------------------------------------------------------
# normal cones


def test_normal_cone_at_square_corner():
    cone = cg.normal_cone_at(unit_square(), [1.0, 1.0])
    G = {tuple(np.round(g, 9)) for g in cone.generators}
    assert G == {(1.0, 0.0), (0.0, 1.0)}


def test_normal_cone_in_interior_is_trivial():
    assert cg.normal_cone_at(unit_square(), [0.5, 0.5]).is_trivial


def test_normal_cone_outside_point_is_polar_of_shifted_set():
    cone = cg.normal_cone_at(cg.interval([0.5], [1.0]), [0.25])
    assert cone.contains([-1.0]) and not cone.contains([1.0])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(coord, coord), min_size=3, max_size=7), st.tuples(coord, coord))
def test_normal_cone_generators_are_polar(pts, base):
    V = np.array(pts)
    if np.linalg.matrix_rank(V - V.mean(axis=0)) < 2:
        return
    region = cg.VPolytope(V)
    cone = cg.normal_cone_at(region, base)
    if cone.full_space:
        return
    W = region.vertices() - np.asarray(base)
    for g in cone.generators:
        assert np.all(W @ g <= 1e-7)


# ---------------------------------------------------------------------------
# support, projection


@settings(max_examples=50, deadline=None)
@given(st.tuples(coord, coord))
def test_support_of_square_matches_vertices(d):
    d = np.asarray(d)
    V = unit_square().vertices()
    assert cg.support(unit_square(), d) == pytest.approx(float(np.max(V @ d)), abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.tuples(coord, coord))
def test_projection_is_idempotent_and_optimal(p):
    sq = unit_square()
    q = cg.project(np.asarray(p), sq)
    assert sq.contains(q, 1e-9)
    np.testing.assert_allclose(cg.project(q, sq), q, atol=1e-9)
    # variational characterisation of the projection
    for v in sq.vertices():
        assert (np.asarray(p) - q) @ (v - q) <= 1e-8


def test_project_onto_empty_raises():
    with pytest.raises(EmptyRegionError):
        cg.project([0.0], cg.Empty(1))


# ---------------------------------------------------------------------------
# disjointness and relative overlap


def test_closed_intervals_touching_overlap():
    assert not cg.regions_disjoint(cg.interval([0.0], [0.5]), cg.interval([0.5], [1.0]))


def test_open_end_touching_is_disjoint():
    assert cg.regions_disjoint(cg.interval([0.0], [0.5], False, True), cg.interval([0.5], [1.0]))


def test_polytope_overlap_witness_lies_in_both():
    a = unit_square()
    corner = cg.hpolytope(np.vstack([[1.0, 1.0], a.A]), np.r_[0.2, a.b])
    d = cg.disjointness(a, corner)
    assert not d.disjoint
    assert a.contains(d.witness, 1e-9) and d.witness.sum() <= 0.2 + 1e-9


def test_relative_overlap_ignores_box_boundary_faces():
    box = cg.interval([0.0], [1.0])
    # [0.5, 1] against the value (x, 1] with x near 1: overlap at the box edge is real
    d = cg.relative_overlap(cg.interval([0.99], [1.0], True, False), cg.interval([0.5], [1.0]), box, tol=1e-3)
    assert not d.disjoint


def test_relative_overlap_strict_margin():
    box = cg.interval([0.0], [1.0])
    a = cg.interval([0.5], [0.6], False, True)
    b = cg.interval([0.0], [0.5])
    # touching at 0.5 only: a witness cannot beat any positive tolerance
    assert cg.relative_overlap(a, b, box, tol=1e-9).disjoint


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 0.05), st.floats(0, 0.05))
def test_relative_overlap_is_monotone_in_tol(a0, a1, b0, b1, t1, t2):
    box = cg.interval([0.0], [1.0])
    a = cg.interval([min(a0, a1)], [max(a0, a1)], True, False)
    b = cg.interval([min(b0, b1)], [max(b0, b1)])
    lo, hi = sorted((t1, t2))
    if cg.relative_overlap(a, b, box, hi).disjoint is False:
        assert not cg.relative_overlap(a, b, box, lo).disjoint


def test_ball_inside_and_inner_radius():
    sq = unit_square()
    assert cg.ball_inside(sq, [0.5, 0.5], 0.5)
    assert not cg.ball_inside(unit_square(strict=True), [0.5, 0.5], 0.5)
    r, strict = cg.inner_radius(sq, [0.5, 0.5])
    assert r == pytest.approx(0.5) and not strict


# ---------------------------------------------------------------------------
# LP and min-norm helpers against scipy


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(coord, coord, coord), min_size=1, max_size=5), st.tuples(coord, coord))
def test_lp_matches_linprog(rows, c):
    A = np.array([r[:2] for r in rows])
    b = np.abs(np.array([r[2] for r in rows])) + 0.1  # 0 is feasible
    c = np.asarray(c)
    box = (np.full(2, -1.0), np.full(2, 1.0))
    ours = lp_solve(c, (A, b), box)
    ref = linprog(c, A_ub=A, b_ub=b, bounds=list(zip(*box)), method="highs")
    assert ref.status == 0
    assert ours.value == pytest.approx(ref.fun, abs=1e-7)


def test_lp_infeasible():
    with pytest.raises(InfeasibleLPError):
        lp_solve(np.array([1.0]), (np.array([[1.0], [-1.0]]), np.array([-1.0, -1.0])), (np.array([-5.0]), np.array([5.0])))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(coord, coord), min_size=1, max_size=6))
def test_min_norm_point_optimality(pts):
    V = np.array(pts)
    x, w = min_norm_point(V)
    assert w.min() >= -1e-12 and w.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(w @ V, x, atol=1e-8)
    # x is the min-norm point iff <x, v - x> >= 0 for every v
    assert np.all((V - x) @ x >= -1e-8)


def test_project_onto_hull_inside_point_is_fixed():
    V = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    q, _ = project_onto_hull(np.array([0.2, 0.2]), V)
    np.testing.assert_allclose(q, [0.2, 0.2], atol=1e-9)


def test_compact_convex_set_scaling():
    T = cg.CompactConvexSet(2, [[1.0, 0.0], [0.0, 1.0]])
    assert T.scale == pytest.approx(1.0)
    assert T.scaled(10.0).contains([5.0, 5.0])
    assert cg.CompactConvexSet(2, unit_ball=True).min_norm_element().tolist() == [0.0, 0.0]


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8), st.booleans(), st.booleans()), min_size=4, max_size=4),
       st.sampled_from([0.0, 1e-9, 0.05]))
def test_interval_closed_form_matches_lp(ends, tol):
    # lattice endpoints make touching and nested cases common
    def make(e1, e2):
        (a, b, lo_open, hi_open), (c, d, lo2, hi2) = e1, e2
        lo, hi = sorted((a / 8, b / 8)), sorted((c / 8, d / 8))
        return cg.IntervalProduct([lo[0], hi[0]], [lo[1], hi[1]],
                                  [lo_open and lo[0] < lo[1], lo2 and hi[0] < hi[1]],
                                  [hi_open and lo[0] < lo[1], hi2 and hi[0] < hi[1]])

    a, b = make(ends[0], ends[1]), make(ends[2], ends[3])
    fast = cg._interval_overlap(a, b, tol)
    slow = cg._lp_overlap(a, b, tol)
    if abs(fast.details.get("margin", 1.0) - tol) < 1e-7:
        return  # margin equals tol: the LP only resolves it to solver accuracy
    assert fast.disjoint == slow.disjoint
    if not fast.disjoint:
        assert a.contains(fast.witness, tol) and b.contains(fast.witness, tol)
