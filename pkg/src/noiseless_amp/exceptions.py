"""Error types raised by the package.

Errors deriving from :class:`NumericalError` signal a numerical fault (the
CLI maps them to exit status 3). Plain ``ValueError`` subclasses are input
validation problems (exit status 2).
"""


class NumericalError(ArithmeticError):
    """Base class for numerical failures."""


class ImaginaryResidueTooLarge(NumericalError):
    pass


class NegativeEigenvalue(NumericalError):
    pass


class NotCirculant(NumericalError):
    pass


class SolverFailure(NumericalError):
    pass


class InvalidResidual(NumericalError):
    pass


class DegenerateP(NumericalError):
    pass


class LengthMismatch(ValueError):
    pass


class OutOfRegime(ValueError):
    pass


class UnknownScenario(ValueError):
    pass


class DegenerateSource(UserWarning):
    """Source amplitude is zero: identical states, bound collapses to 0."""
