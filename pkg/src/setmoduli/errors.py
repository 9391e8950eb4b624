"""Exception hierarchy for the toolkit."""


class SetModuliError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatchError(SetModuliError, ValueError):
    """Operands live in different ambient dimensions."""


class SolverFailureError(SetModuliError, RuntimeError):
    """An iterative solver hit its iteration limit or went numerically bad.

    ``best_iterate`` carries the last iterate so callers can inspect or
    recover from near-misses.
    """

    def __init__(self, message, best_iterate=None):
        super().__init__(message)
        self.best_iterate = best_iterate


class UnboundedPolyhedronError(SetModuliError, ValueError):
    """A bounded polyhedron was required but a recession direction exists."""


class UnsupportedDimensionError(SetModuliError, ValueError):
    """Exact vertex enumeration is only available in dimension <= 4."""


class UnsupportedSizeError(SetModuliError, ValueError):
    """Enumeration problem too large (e.g. complementarity systems with n > 12)."""


class PreconditionError(SetModuliError, ValueError):
    """An operation's stated precondition does not hold for the inputs."""


class NoAdmissibleActiveSetError(SetModuliError, ValueError):
    """No admissible active subset exists for the point-based formula."""


class EnumerationBudgetError(SetModuliError, ValueError):
    """Active-set enumeration would exceed the configured budget."""


class DegenerateLevelSetError(SetModuliError, ValueError):
    """Level-set root isolation found a tangency it cannot certify."""


class SingularMatrixError(SetModuliError, ValueError):
    """A matrix that must be invertible is numerically singular."""


class ScenarioValidationError(SetModuliError, ValueError):
    """A scenario file failed validation; ``field`` names the offender."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
