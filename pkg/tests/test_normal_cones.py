import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prefgames import convex_geometry as cg
from prefgames import fixtures
from prefgames.exceptions import DegenerateConeError, PreconditionError
from prefgames.normal_cones import (
    PROPERTIES,
    NormalOperator,
    blended_cap_operator,
    cap_operator,
    cap_witness,
    check_properties,
    f_operator,
    normal_operator,
)
from prefgames.preferences import PreferenceMap


def test_normal_cone_of_example_3_1():
    P = fixtures.example_3_1()
    # P(0.25) = (0.25, 1]: normals point left
    cone = normal_operator(P, [0.25])
    assert cone.contains([-1.0]) and not cone.contains([1.0])
    assert normal_operator(P, [0.5]).full_space
    # P(0.75) = [0.5, 0.75): normals point right
    assert NormalOperator(P)([0.75]).contains([1.0])


def test_f_is_unit_ball_on_empty_value():
    T = f_operator(fixtures.example_3_1(), [0.5])
    assert T.unit_ball and T.radius == 1.0


def test_f_values_are_unit_normals():
    T = f_operator(fixtures.open_box_map([0.5, 0.5]), [0.9, 0.9])
    norms = np.linalg.norm(T.generators, axis=1)
    np.testing.assert_allclose(norms, 1.0)
    assert 0.0 not in T.generators.tolist()
    assert not T.contains([0.0, 0.0])


def test_f_degenerate_cases():
    inside = PreferenceMap(lambda x, y: cg.interval([0.0], [1.0]), ([0.0], [1.0]), name="everything")
    with pytest.raises(DegenerateConeError):
        f_operator(inside, [0.5])
    point = PreferenceMap(lambda x, y: cg.interval(x, x), ([0.0], [1.0]), name="self")
    with pytest.raises(DegenerateConeError):
        f_operator(point, [0.5])
    assert f_operator(point, [0.5], allow_degenerate=True).unit_ball


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_f_separates_value_from_x(px, py, x1, x2):
    P = fixtures.open_ball_map([px, py])
    x = np.array([x1, x2])
    region = P(x)
    if region.is_empty:
        return
    T = f_operator(P, x)
    W = region.sample(12, np.random.default_rng(0))
    for s in T.generators:
        assert np.all((W - x) @ s < 0)


def test_cap_witness_and_operator_on_example_3_1():
    P = fixtures.example_3_1()
    wit = cap_witness(P, [0.25])
    assert wit.eps > 0 and 0 <= wit.t < 1
    # the 2 eps ball about the centre sits in P at the anchor
    assert cg.ball_inside(P([0.25]), wit.center, 2 * wit.eps, clip=(P.domain.lo, P.domain.hi))
    T = cap_operator(wit, P, [0.25 + 0.5 * wit.eps])
    s = T.vertices()
    np.testing.assert_allclose(s @ wit.h, wit.eps)
    assert np.all(np.linalg.norm(s, axis=1) <= 1 + 1e-12)


def test_cap_operator_outside_ball_raises():
    P = fixtures.example_3_1()
    wit = cap_witness(P, [0.25])
    with pytest.raises(PreconditionError):
        cap_operator(wit, P, [0.25 + 3 * wit.eps])


def test_cap_witness_needs_nonempty_value():
    with pytest.raises(PreconditionError):
        cap_witness(fixtures.example_3_1(), [0.5])


def test_blended_cap_operator_is_convex_combination():
    P = fixtures.open_ball_map([0.2, 0.8])
    a = cap_witness(P, [0.7, 0.3])
    b = cap_witness(P, [0.7 + 0.5 * a.eps, 0.3])
    x = np.array([0.7 + 0.25 * a.eps, 0.3])
    T = blended_cap_operator([a, b], P, x)
    Ta, Tb = cap_operator(a, P, x), cap_operator(b, P, x)
    # every blended vertex lies between the support values of the parts
    for d in np.eye(2):
        assert T.support(d) <= max(Ta.support(d), Tb.support(d)) + 1e-9


def test_check_properties_rejects_unknown_name():
    with pytest.raises(ValueError):
        check_properties(fixtures.example_3_1(), ["nope"], [[0.2]])


def test_properties_hold_on_example_3_1():
    P = fixtures.example_3_1()
    rep = check_properties(P, PROPERTIES, [[0.1], [0.3], [0.5], [0.7], [0.95]], n_sequences=4, steps=10)
    for name in PROPERTIES:
        assert rep[name]["passed"], (name, rep[name]["violations"])
    # the empty value at 1/2 is filtered where the property needs a non-empty value
    assert rep["pointed"]["filtered"] >= 1


def test_properties_hold_on_parametric_tracking_map():
    P = fixtures.tracking_map()
    rep = check_properties(P, PROPERTIES, [[0.2], [0.8]], rivals=[[0.6], [0.1]], n_sequences=3, steps=8)
    assert all(rep[name]["passed"] for name in PROPERTIES)
    assert rep["cap_graph"]["checked"] == 2


def test_reflexive_points_are_filtered():
    rep = check_properties(fixtures.example_3_2(), ["nonzero_normal"], [[0.6]])
    assert rep["nonzero_normal"]["filtered"] == 1
    assert rep["nonzero_normal"]["checked"] == 0
