"""Exception hierarchy. Each class maps onto one CLI exit code."""


class NilweylError(Exception):
    exit_code = 1


class InvalidParameter(NilweylError, ValueError):
    """A precondition on the inputs does not hold."""

    exit_code = 1


class NoSolution(InvalidParameter):
    """The requested object does not exist (e.g. mismatched leading frequencies)."""


class ObstructionError(InvalidParameter):
    """The input has a nonzero invariant-distribution value.

    ``value`` holds the offending value so callers can report it.
    """

    def __init__(self, message, value):
        super().__init__(message)
        self.value = value


class NumericalFailure(NilweylError, ArithmeticError):
    exit_code = 2


class ResourceExceeded(NilweylError, RuntimeError):
    """A work budget ran out. ``partial`` carries the best result so far, if any."""

    exit_code = 3

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
