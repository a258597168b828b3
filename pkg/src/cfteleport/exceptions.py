"""Exception hierarchy shared by all modules."""


class TeleportError(Exception):
    """Base class for every error raised by :mod:`cfteleport`."""


class MalformedInputError(TeleportError, ValueError):
    """Input array has the wrong shape or is not symmetric."""


class NotBonaFideError(TeleportError, ValueError):
    """Covariance matrix violates the uncertainty principle."""


class InvariantError(TeleportError, ValueError):
    """Symplectic invariants admit no real standard form."""


class GeometryError(TeleportError, ValueError):
    """Beam-splitter angle outside the open interval (0, pi/2)."""


class RegimeError(TeleportError, ValueError):
    """A closed form was requested outside its range of validity."""


class SingularStateError(TeleportError, ValueError):
    """Closed-form optimum diverges for this state."""


class DegenerateStateError(TeleportError, RuntimeError):
    """Added-noise objective has no interior minimum."""


class DegenerateConditioningError(TeleportError, RuntimeError):
    """Measured variables have a singular covariance."""


class GridError(TeleportError, ValueError):
    """CF grid has an invalid shape or two grids are incompatible."""


class DomainError(TeleportError, ValueError):
    """Argument outside the domain of a function (e.g. nonpositive squeezing)."""
