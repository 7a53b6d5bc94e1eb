"""scikit-learn style wrappers around the verification and solver routines.

The problem (a preference map, a feasible set, a game) is a constructor
parameter; ``fit`` runs the search and ``predict`` labels query points.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .games import cluster_representatives, is_equilibrium, is_maximal
from .preferences import Resolution, check_lower_midpoint, check_upper_midpoint, sample_domain
from .reformulation import equilibrium_via_qvi, maximal_via_vi

__all__ = ["MidpointContinuityClassifier", "MaximalElementFinder", "EquilibriumFinder"]


def _rows(X, dim):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, dim)
    if X.ndim != 2 or X.shape[1] != dim:
        raise ValueError(f"expected points with {dim} coordinates, got shape {X.shape}")
    return X


class MidpointContinuityClassifier(ClassifierMixin, BaseEstimator):
    """Label points 1 where the mid-point condition holds at resolution,
    0 where a counterexample is found.

    ``kind`` is ``"lower"``, ``"upper"`` or ``"both"``.  ``fit(X)`` checks
    the points in ``X`` (default: an 11-point grid per axis) and keeps the
    verdicts in ``verdicts_``.
    """

    def __init__(self, preference=None, kind="lower", m=64, eps_min=1e-4, n_w=17, n_neighbors=11, seed=0):
        self.preference = preference
        self.kind = kind
        self.m = m
        self.eps_min = eps_min
        self.n_w = n_w
        self.n_neighbors = n_neighbors
        self.seed = seed

    def _resolution(self):
        return Resolution(m=self.m, eps_min=self.eps_min, n_w=self.n_w, n_neighbors=self.n_neighbors, seed=self.seed)

    def _verdicts(self, x):
        P, res = self.preference, self.resolution_
        out = []
        if self.kind in ("lower", "both"):
            out.append(check_lower_midpoint(P, x, None, res))
        if self.kind in ("upper", "both"):
            out.append(check_upper_midpoint(P, x, None, res))
        return out

    def fit(self, X=None, y=None):
        if self.preference is None:
            raise ValueError("preference is required")
        if self.kind not in ("lower", "upper", "both"):
            raise ValueError(f"kind must be lower, upper or both, got {self.kind!r}")
        self.resolution_ = self._resolution()
        dim = self.preference.own_dim
        X = sample_domain(self.preference.domain, 11) if X is None else _rows(X, dim)
        self.classes_ = np.array([0, 1])
        self.points_ = X
        self.verdicts_ = [self._verdicts(x) for x in X]
        self.labels_ = np.array([int(all(v.holds for v in vs)) for vs in self.verdicts_])
        return self

    def predict(self, X):
        check_is_fitted(self, "resolution_")
        X = _rows(X, self.preference.own_dim)
        return np.array([int(all(v.holds for v in self._verdicts(x))) for x in X])


class MaximalElementFinder(BaseEstimator):
    """Maximal elements of ``preference`` on ``feasible`` through VI(F, K).

    After ``fit``: ``certificates_`` (verified grid points),
    ``representatives_`` (one point per cluster of adjacent grid points)
    and ``result_`` (the full pipeline result).
    """

    def __init__(self, preference=None, feasible=None, grid=101, tol=1e-9, seed=0, audit_samples=0):
        self.preference = preference
        self.feasible = feasible
        self.grid = grid
        self.tol = tol
        self.seed = seed
        self.audit_samples = audit_samples

    def fit(self, X=None, y=None):
        if self.preference is None:
            raise ValueError("preference is required")
        K = self.feasible if self.feasible is not None else self.preference.domain
        self.feasible_ = K
        self.result_ = maximal_via_vi(self.preference, K, self.grid, self.tol, audit_samples=self.audit_samples,
                                      seed=self.seed)
        self.certificates_ = self.result_.certificates
        # the solver grid spans the bounding box of K
        lo, hi = K.bounding_box()
        spacing = float(np.max(hi - lo)) / (self.grid - 1)
        self.representatives_ = cluster_representatives(self.result_.points, spacing)
        return self

    def predict(self, X):
        """1 where the point is a maximal element (checked directly)."""
        check_is_fitted(self, "result_")
        X = _rows(X, self.preference.own_dim)
        out = []
        for x in X:
            ok = self.feasible_.contains(x, self.tol) and is_maximal(self.preference, self.feasible_, x, self.tol).maximal
            out.append(int(ok))
        return np.array(out)


class EquilibriumFinder(BaseEstimator):
    """Equilibria of a game through QVI(F, K); ``predict`` checks profiles."""

    def __init__(self, game=None, grid=101, tol=1e-9, seed=0, starts=10, max_iters=5000, audit_samples=5):
        self.game = game
        self.grid = grid
        self.tol = tol
        self.seed = seed
        self.starts = starts
        self.max_iters = max_iters
        self.audit_samples = audit_samples

    def fit(self, X=None, y=None):
        if self.game is None:
            raise ValueError("game is required")
        self.result_ = equilibrium_via_qvi(self.game, self.grid, self.tol, audit_samples=self.audit_samples,
                                           seed=self.seed, starts=self.starts, max_iters=self.max_iters)
        self.certificates_ = self.result_.certificates
        self.audit_ = self.result_.audit
        return self

    def predict(self, X):
        check_is_fitted(self, "result_")
        X = _rows(X, self.game.total_dim)
        return np.array([int(is_equilibrium(self.game, x, self.tol).verdict) for x in X])
