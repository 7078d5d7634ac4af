"""Exception hierarchy shared by all modules."""


class EllipsumError(ValueError):
    """Base class for every error raised by this package."""


class ZeroArgument(EllipsumError):
    pass


class NomeOutOfRange(EllipsumError):
    pass


class TruncationFailure(EllipsumError):
    pass


class DivisionByZeroTheta(EllipsumError):
    """A denominator theta value lies within delta of the theta zero set."""


class BadArity(EllipsumError):
    pass


class ConstraintViolated(EllipsumError):
    """A structural or multiplicative balancing condition does not hold."""


class DegenerateConstraint(EllipsumError):
    pass


class InsufficientWindow(EllipsumError):
    """A finite Laurent window is too short to determine the requested coefficient."""


class IndexOutOfSequenceWindow(EllipsumError):
    pass


class DegenerateSpectrum(EllipsumError):
    pass


class Unsampleable(EllipsumError):
    pass


class BadShape(EllipsumError):
    pass


class NotApplicable(EllipsumError):
    """The identity has no content at the requested nome (e.g. p = 0)."""
