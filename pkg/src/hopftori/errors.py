"""Exception hierarchy.

Every error raised by the library derives from :class:`HopfToriError` so
callers can catch the whole family at once.
"""


class HopfToriError(Exception):
    pass


class DomainError(HopfToriError, ValueError):
    """A curvature value left the domain where the Lagrangian is smooth."""


class UnsupportedRelation(HopfToriError, ValueError):
    pass


class ParameterError(HopfToriError, ValueError):
    pass


class SingularDenominator(ParameterError):
    pass


class NoOscillation(HopfToriError):
    pass


class QuadratureFailure(HopfToriError):
    pass


class IntegrationDiverged(HopfToriError):
    pass


class DegenerateRotation(HopfToriError):
    pass


class NoRoot(HopfToriError):
    pass


class NotClosed(HopfToriError):
    pass


class OffSphere(HopfToriError, ValueError):
    pass


class ChartSingularity(HopfToriError):
    pass


class ChartExit(HopfToriError):
    pass


class NotClosedLift(HopfToriError):
    pass


class PoorFit(HopfToriError):
    """The Killing-field least-squares fit failed; the curve is not critical."""


class NonPeriodicOrbit(HopfToriError):
    pass


class CurvatureZeroCrossing(HopfToriError):
    pass


class IsoparametricInput(HopfToriError):
    pass


class BranchTooShort(HopfToriError):
    pass


class AtPole(HopfToriError, ValueError):
    pass


class DegenerateCell(HopfToriError):
    pass


class ConfigError(HopfToriError, ValueError):
    pass


class ConstraintViolation(UserWarning):
    """Warning: (m, n) outside the range where closed curves are known to exist."""
