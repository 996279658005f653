"""Exception hierarchy for grasspoly."""


class GrassPolyError(ValueError):
    """Base class for all errors raised by grasspoly."""


class InvalidFrameError(GrassPolyError):
    """Columns of a frame are not orthonormal."""


class NotAPlaneError(GrassPolyError):
    """A skew matrix is not the Plücker matrix of a 2-plane."""


class DegenerateEdgeError(GrassPolyError):
    """The canonical triangle needs a nonzero edge c."""


class DomainError(GrassPolyError):
    """Argument outside the domain of a formula."""


class InvalidPolygonError(GrassPolyError):
    """Edge vectors do not close up."""


class DegenerateLiftError(GrassPolyError):
    """A frame row is zero, so its direction is undefined."""


class BoundaryError(GrassPolyError):
    """Point lies on a wall where a sign is indeterminate."""


class SamplingExhaustedError(GrassPolyError):
    """Rejection sampler ran out of tries."""

    def __init__(self, message, acceptance_rate=0.0, tries=0):
        super().__init__(message)
        self.acceptance_rate = acceptance_rate
        self.tries = tries


class CellMismatchError(GrassPolyError):
    """Endpoints of an interpolation lie in different sign cells."""


class CapacityError(GrassPolyError):
    """Exhaustive enumeration requested for too large a group."""


class DegenerateMeanError(GrassPolyError):
    """The flag mean is not unique (no singular value gap)."""


class InsufficientSamplesError(GrassPolyError):
    """Expected cell counts too small for a chi-square test."""


class ConsistencyError(GrassPolyError):
    """A verified structural claim failed."""


class UnknownExperimentError(GrassPolyError, KeyError):
    """No experiment registered under that name."""
