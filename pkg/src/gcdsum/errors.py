class GcdSumError(Exception):
    pass


class RangeError(GcdSumError, ValueError):
    """Argument outside the supported numeric range."""


class DomainError(GcdSumError, ValueError):
    """Parameters outside an operation's hypothesis domain."""


class SizeError(GcdSumError, ValueError):
    """Input too large for a dense-matrix or eigensolver cap."""


class PoleError(GcdSumError, ZeroDivisionError):
    """Evaluation requested at the pole of zeta."""


class HypothesisError(GcdSumError):
    """A bound's hypothesis is not met; reported rather than raised by evaluators."""
