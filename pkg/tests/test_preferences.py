import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prefgames import convex_geometry as cg
from prefgames import fixtures
from prefgames.exceptions import ConvexityError, ExpressionError, OutOfDomainError
from prefgames.expressions import parse_expression, profile_env
from prefgames.preferences import (
    Piece,
    Resolution,
    check_internal_points,
    check_irreflexive,
    check_lower_midpoint,
    check_lsc,
    check_open_valued,
    check_relation_lsc,
    check_upper_midpoint,
    classify_sufficient_conditions,
    from_utility,
    piecewise_map,
    sample_domain,
)
from prefgames.reproduce import example_3_1_table


# ---------------------------------------------------------------------------
# expression grammar


@pytest.mark.parametrize(
    "src, env, expected",
    [
        ("x + 2*x1", {"x": 1.0, "x1": 1.0}, 3.0),
        ("-(x1 - x2)^2", {"x1": 0.2, "x2": 0.6}, -0.16),
        ("2^3^2", {}, 512.0),
        ("min(x, 0.3) + max(x, 0.9) + abs(-x)", {"x": 0.5}, 0.3 + 0.9 + 0.5),
        ("(x < 0.5)*x + (x >= 0.5)*(2 - x)", {"x": 0.75}, 1.25),
    ],
)
def test_expression_values(src, env, expected):
    assert float(parse_expression(src)(env)) == pytest.approx(expected)


@pytest.mark.parametrize("src", ["__import__('os')", "x.real", "lambda: 1", "y + 1", "x[0]", "", "1 +"])
def test_expression_rejects_unsafe_or_bad_input(src):
    with pytest.raises(ExpressionError):
        parse_expression(src)({"x": 1.0})


def test_expression_broadcasts_over_profiles():
    e = parse_expression("x1 * x2")
    out = e(profile_env(np.array([[1.0, 2.0], [3.0, 4.0]])))
    np.testing.assert_allclose(out, [2.0, 12.0])


# ---------------------------------------------------------------------------
# the two worked examples


def test_example_3_1_matches_closed_form_table():
    P = fixtures.example_3_1()
    U = fixtures.example_3_1_from_utility()
    for x in np.linspace(0, 1, 201):
        row = example_3_1_table(x)
        for M in (P, U):
            v = M([x])
            if row is None:
                assert v.is_empty
            else:
                lo, hi, lo_open, hi_open = row
                assert v.lo[0] == pytest.approx(lo, abs=1e-9) and v.hi[0] == pytest.approx(hi, abs=1e-9)
                assert (bool(v.lo_open[0]), bool(v.hi_open[0])) == (lo_open, hi_open)


def test_example_3_1_is_irreflexive():
    P = fixtures.example_3_1()
    assert check_irreflexive(P, sample_domain(P.domain, 101)) == []


@pytest.mark.parametrize("x", [0.0, 0.25, 0.5, 0.51, 0.75, 1.0])
def test_example_3_1_midpoint_continuous(x):
    P = fixtures.example_3_1()
    lo = check_lower_midpoint(P, [x])
    up = check_upper_midpoint(P, [x])
    assert lo.holds and up.holds
    assert lo.status == "verified-at-resolution"
    assert lo.resolution["m"] == 64


def test_example_3_1_relation_not_lsc_at_one():
    v = check_relation_lsc(fixtures.example_3_1(), [1.0])
    assert not v.holds
    assert v.counterexample["w"] == [0.5]
    # escape points approach 1/2 from below
    esc = [e["escape"][0] for e in v.counterexample["escapes"]]
    assert esc[-1] < 0.5 and 0.5 - esc[-1] < 1e-3


def test_example_3_1_values_not_open_above_half():
    P = fixtures.example_3_1()
    assert check_open_valued(P, [0.3]).holds
    assert not check_open_valued(P, [0.75]).holds


def test_example_3_2_not_lsc_at_half():
    v = check_lsc(fixtures.example_3_2(), [0.5])
    assert not v.holds
    assert v.counterexample["x"] == [0.5]
    assert all(e["x_prime"][0] > 0.5 for e in v.counterexample["escapes"])


@pytest.mark.parametrize("x", [0.0, 0.3, 0.5, 0.6, 0.8, 1.0])
def test_example_3_2_upper_midpoint(x):
    assert check_upper_midpoint(fixtures.example_3_2(), [x]).holds


def test_example_3_2_lower_midpoint_fails_above_three_quarters():
    P = fixtures.example_3_2()
    assert check_lower_midpoint(P, [0.7]).holds
    v = check_lower_midpoint(P, [0.9])
    assert not v.holds and v.status == "counterexample"


def test_example_3_2_reflexive_on_middle_band():
    P = fixtures.example_3_2()
    bad = [float(b[0]) for b in check_irreflexive(P, [[0.4], [0.6], [0.75], [0.8]])]
    assert bad == [0.6, 0.75]


def test_classify_reports_converse_failures():
    c = classify_sufficient_conditions(fixtures.example_3_1(), [0.75])
    assert not c["open_valued"].holds and c["lower_midpoint"].holds
    assert "a" in c["converse_failures"]
    assert all(v["holds"] for v in c["implications"].values())


# ---------------------------------------------------------------------------
# sufficient conditions on open-valued maps


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 20), st.floats(0, 1))
def test_single_peaked_open_values_imply_lower_midpoint(k, x):
    P = fixtures.single_peaked_map(k / 20)
    if check_open_valued(P, [x]).holds:
        assert check_lower_midpoint(P, [x]).holds


def test_internal_points_on_open_box():
    P = fixtures.open_box_map([0.5, 0.5])
    assert check_internal_points(P, [0.2, 0.4]).holds


# ---------------------------------------------------------------------------
# construction


def test_piecewise_uncovered_point_raises():
    P = piecewise_map([Piece(0.0, 0.5, lo=0.0, hi=1.0)])
    with pytest.raises(OutOfDomainError):
        P([0.75])


def test_out_of_domain_argument_raises():
    with pytest.raises(OutOfDomainError):
        fixtures.example_3_1()([1.5])


def test_from_utility_jump_gives_closed_end():
    P = from_utility(lambda z: z if z < 0.5 else 2 - z, ([0.0], [1.0]))
    v = P([0.75])
    assert v.lo[0] == pytest.approx(0.5) and not v.lo_open[0] and v.hi_open[0]


def test_from_utility_nonconvex_contour_rejected():
    P = from_utility(lambda z: -abs(abs(z - 0.5) - 0.25), ([0.0], [1.0]))
    with pytest.raises(ConvexityError):
        P([0.5])


def test_from_utility_2d_fit_within_tolerance():
    peak = np.array([0.4, 0.6])
    P = from_utility(lambda z: -float(np.sum((np.asarray(z) - peak) ** 2)), ([0, 0], [1, 1]))
    region = P([0.1, 0.1])
    r = np.linalg.norm(np.array([0.1, 0.1]) - peak)
    # boundary points of the fitted polytope sit on the true circle up to the fit tolerance
    for v in region.vertices():
        inside_box = np.all(v > 1e-9) and np.all(v < 1 - 1e-9)
        if inside_box:
            assert abs(np.linalg.norm(v - peak) - r) <= 1e-3
    assert max(P.fit_errors) <= P.fit_tolerance


def test_resolution_validation():
    with pytest.raises(ValueError):
        Resolution(m=0)
    with pytest.raises(ValueError):
        Resolution(eps_min=0.0)
    assert Resolution().finer().m == 640


def test_verdicts_are_deterministic_for_a_seed():
    P = fixtures.open_ball_map([0.3, 0.7])
    a = check_upper_midpoint(P, [0.8, 0.2], res=Resolution(seed=3)).to_dict()
    b = check_upper_midpoint(P, [0.8, 0.2], res=Resolution(seed=3)).to_dict()
    assert a == b


def test_empty_map_is_vacuously_midpoint_continuous():
    v = check_lower_midpoint(fixtures.empty_map(), [0.4])
    assert v.holds and v.vacuous


def test_sample_domain_shape_and_order():
    pts = sample_domain(cg.interval([0, 0], [1, 1]), 3)
    assert pts.shape == (9, 2)
    assert pts[1].tolist() == [0.0, 0.5]
