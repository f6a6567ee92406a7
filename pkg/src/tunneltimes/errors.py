"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """A physical parameter is outside the domain of the requested quantity."""


class PoleProximityError(ArithmeticError):
    """A scattering amplitude was evaluated at or numerically on top of a pole."""


class RegimeViolationError(ValueError):
    """A limiting-regime approximation was requested outside its smallness gate."""


class NonConvergenceError(RuntimeError):
    """An adaptive numerical scheme exhausted its budget before reaching tolerance."""


class ImaginaryResidueError(ArithmeticError):
    """A quantity that must be real came out with a non-negligible imaginary part."""


class CountMismatchError(RuntimeError):
    """Root harvest disagrees with the argument-principle count over a region."""


class GridTooSmallError(ValueError):
    """The simulation grid cannot hold the requested initial state."""


class InsufficientFluxError(RuntimeError):
    """Too little probability reached the detector to form a meaningful average."""


class ValidityWarning(UserWarning):
    """The closed-form expressions are being used outside their validity regime."""
