"""Exception hierarchy shared by all qcomp modules."""


class QcompError(Exception):
    """Base class for every error raised by qcomp."""


class DomainError(QcompError, ValueError):
    """A function was evaluated outside its domain of validity."""


class InvalidParameter(QcompError, ValueError):
    pass


class UnknownOperator(QcompError, KeyError):
    pass


class CFLViolation(QcompError):
    """The explicit step size exceeds the realized stability bound."""


class Overflow(QcompError):
    pass


class MonotonicityLost(QcompError):
    """A comparison profile stopped being non-decreasing in space."""


class NotInvertible(QcompError):
    pass


class SlopeCollapse(QcompError):
    pass


class DomainExhausted(QcompError):
    pass


class BracketingFailure(QcompError):
    pass


class DegenerateOperator(QcompError):
    pass


class MatchingFailure(QcompError):
    pass


class NonConvergence(QcompError):
    def __init__(self, message, last_value=None, residual=None):
        super().__init__(message)
        self.last_value = last_value
        self.residual = residual


class TimeMismatch(QcompError):
    pass


class PreconditionFailed(QcompError):
    pass


class RangeError(QcompError):
    """Field values left the range on which a barrier can be inverted."""


class DegenerateFit(QcompError):
    pass


class ConfigError(QcompError):
    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
