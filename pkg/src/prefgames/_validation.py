"""Input validation helpers used at public entry points."""

import numbers

import numpy as np

from .exceptions import DimensionMismatchError

MAX_DIM = 8


def check_point(p, dim=None, name="point"):
    """Return ``p`` as a finite 1-D float array, optionally of length ``dim``."""
    arr = np.atleast_1d(np.asarray(p, dtype=float))
    if arr.ndim != 1:
        raise DimensionMismatchError(f"{name} must be a vector, got shape {arr.shape}")
    if arr.size == 0:
        raise DimensionMismatchError(f"{name} must have at least one coordinate")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries: {arr}")
    if dim is not None and arr.size != dim:
        raise DimensionMismatchError(f"{name} has dimension {arr.size}, expected {dim}")
    return arr


def check_points(X, dim=None, name="X"):
    """2-D array of points, one per row. A 1-D input is read as ``dim == 1``
    samples when ``dim`` is 1 and as a single point otherwise."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1) if dim == 1 else arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    if dim is not None and arr.shape[1] != dim:
        raise DimensionMismatchError(f"{name} has {arr.shape[1]} columns, expected {dim}")
    return arr


def check_tol(tol, name="tol"):
    if not isinstance(tol, numbers.Real) or not np.isfinite(tol) or tol < 0:
        raise ValueError(f"{name} must be a finite non-negative number, got {tol!r}")
    return float(tol)


def check_positive_int(n, name, minimum=1):
    if isinstance(n, bool) or not isinstance(n, numbers.Integral) or n < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {n!r}")
    return int(n)


def check_same_dim(a, b, what="regions"):
    if a != b:
        raise DimensionMismatchError(f"{what} have dimensions {a} and {b}")
