"""Exception and warning types raised across the package."""


class QfiError(Exception):
    """Base class for all errors raised by openqfi."""


class NotHermitianError(QfiError, ValueError):
    pass


class NotTracelessError(QfiError, ValueError):
    pass


class DimensionMismatchError(QfiError, ValueError):
    pass


class NotSquareLengthError(QfiError, ValueError):
    pass


class NumericalOverflowError(QfiError, ArithmeticError):
    pass


class ToleranceNotMetError(QfiError, ArithmeticError):
    """Integrated state drifted outside the density-matrix tolerances."""


class ZeroLogDerivativeError(QfiError, ValueError):
    pass


class SingularStateError(QfiError, ValueError):
    """The state has a (numerically) zero eigenvalue; the upper bound is undefined."""


class NonpositiveInformationError(QfiError, ValueError):
    pass


class DomainError(QfiError, ValueError):
    pass


class DimensionLimitError(QfiError, ValueError):
    pass


class UnsupportedOrderError(QfiError, ValueError):
    pass


class ConfigError(QfiError, ValueError):
    pass


class NonMarkovianWarning(UserWarning):
    """A rate profile takes negative values; positivity is no longer guaranteed."""
