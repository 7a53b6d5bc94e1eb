"""Maximal elements and equilibria of generalized games with non-ordered
preferences, computed through variational and quasi-variational
inequalities built from normal cones of the preference values."""

__version__ = "0.1.0"

from .convex_geometry import *  # noqa: F401,F403
from .preferences import *  # noqa: F401,F403
from .normal_cones import *  # noqa: F401,F403
from .games import *  # noqa: F401,F403
from .vi_solvers import *  # noqa: F401,F403
from .reformulation import *  # noqa: F401,F403
from .instance import *  # noqa: F401,F403
from .exceptions import *  # noqa: F401,F403
from . import fixtures  # noqa: F401
from .estimators import EquilibriumFinder, MaximalElementFinder, MidpointContinuityClassifier  # noqa: F401
