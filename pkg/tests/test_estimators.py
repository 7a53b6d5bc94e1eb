import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from prefgames import convex_geometry as cg
from prefgames import fixtures
from prefgames.estimators import EquilibriumFinder, MaximalElementFinder, MidpointContinuityClassifier


def test_params_round_trip_through_clone():
    est = MaximalElementFinder(fixtures.example_3_1(), grid=51, tol=1e-8)
    twin = clone(est)
    assert twin.get_params()["grid"] == 51 and twin.get_params()["tol"] == 1e-8
    assert twin.set_params(grid=11).grid == 11


def test_unfitted_predict_raises():
    with pytest.raises(NotFittedError):
        MaximalElementFinder(fixtures.example_3_1()).predict([[0.5]])


def test_maximal_finder_example_3_1():
    est = MaximalElementFinder(fixtures.example_3_1(), grid=201).fit()
    assert [r.tolist() for r in est.representatives_] == [[0.5]]
    assert est.predict([[0.5], [0.25], [0.9]]).tolist() == [1, 0, 0]


def test_maximal_finder_on_subinterval():
    est = MaximalElementFinder(fixtures.single_peaked_map(0.2), cg.interval([0.5], [0.9]), grid=41).fit()
    assert [r.tolist() for r in est.representatives_] == [[0.5]]
    # outside K never counts
    assert est.predict([[0.2]]).tolist() == [0]


def test_midpoint_classifier_example_3_2():
    clf = MidpointContinuityClassifier(fixtures.example_3_2(), kind="lower").fit([[0.3], [0.7], [0.9]])
    assert clf.labels_.tolist() == [1, 1, 0]
    assert clf.predict([[0.95]]).tolist() == [0]
    assert clf.score([[0.3], [0.9]], [1, 0]) == 1.0


def test_midpoint_classifier_validates_kind():
    with pytest.raises(ValueError):
        MidpointContinuityClassifier(fixtures.example_3_1(), kind="sideways").fit([[0.2]])


def test_equilibrium_finder_moving_constraint():
    est = EquilibriumFinder(fixtures.moving_constraint_game(), grid=21, audit_samples=0).fit()
    assert [c.x.tolist() for c in est.certificates_] == [[0.5, 0.5]]
    assert est.predict(np.array([[0.5, 0.5], [0.3, 0.8]])).tolist() == [1, 0]
    with pytest.raises(ValueError):
        est.predict([[0.5, 0.5, 0.5]])
