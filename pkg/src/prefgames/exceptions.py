"""Exception hierarchy shared by every module of the package."""


class PrefGamesError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(PrefGamesError, ValueError):
    pass


class EmptyRegionError(PrefGamesError, ValueError):
    pass


class UnsupportedRegionError(PrefGamesError, NotImplementedError):
    pass


class InfeasibleLPError(PrefGamesError):
    pass


class UnboundedLPError(PrefGamesError):
    pass


class ConvexityError(PrefGamesError, ValueError):
    """A utility's strict upper contour set failed the convexity spot-check.

    ``triple`` holds (in, out, in) points witnessing the violation.
    """

    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class OutOfDomainError(PrefGamesError, ValueError):
    pass


class PreconditionError(PrefGamesError, ValueError):
    pass


class PropertyViolation(PrefGamesError):
    """An operator-level property (non-emptiness, pointedness, ...) failed."""


class DegenerateConeError(PropertyViolation):
    pass


class InfeasiblePointError(PrefGamesError, ValueError):
    pass


class MalformedProblemError(PrefGamesError, ValueError):
    pass


class SearchFailure(PrefGamesError):
    """A witness search exhausted its grid without finding a witness.

    This is a statement about the resolution, not a disproof.
    """


class NonConvergenceError(PrefGamesError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace or []


class InstanceError(PrefGamesError, ValueError):
    """Instance file could not be parsed or validated.

    ``field`` is a dotted path into the document, ``line`` the source line
    when known.
    """

    def __init__(self, message, field=None, line=None):
        loc = []
        if field:
            loc.append(f"field '{field}'")
        if line is not None:
            loc.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)
        self.field = field
        self.line = line


class ExpressionError(PrefGamesError, ValueError):
    """Utility expression failed to parse or uses a forbidden construct."""

    def __init__(self, message, col=None):
        super().__init__(message if col is None else f"{message} at column {col}")
        self.col = col
