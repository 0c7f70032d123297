"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ``ConfigError`` -> 2, any
``NumericError`` -> 3.
"""


class BianchiMaxwellError(Exception):
    """Base class for all package errors."""


class ConfigError(BianchiMaxwellError):
    """Malformed scenario or case configuration."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class ConstraintViolation(ConfigError):
    """Initial data violates the Maxwell constraint equations."""


class NumericError(BianchiMaxwellError):
    """Base class for failures during a numerical computation."""


class SingularMatrix(NumericError):
    pass


class IndexOutOfRange(BianchiMaxwellError, IndexError):
    pass


class DegenerateFrame(NumericError):
    pass


class NonRiemannianEta(NumericError):
    """The spatial metric eta_ab(t) is not positive definite."""


class StepUnderflow(NumericError):
    pass


class QuadratureFailure(NumericError):
    pass


class DomainError(NumericError):
    """A closed-form expression left its domain (negative radicand, zero denominator)."""

    def __init__(self, message, u0=None, quantity=None, value=None):
        self.u0 = u0
        self.quantity = quantity
        self.value = value
        super().__init__(message)


class ParseError(BianchiMaxwellError):
    def __init__(self, message, offset, expected):
        self.offset = offset
        self.expected = expected
        super().__init__(f"{message} at offset {offset} (expected {expected})")


class EvalError(NumericError):
    def __init__(self, message, expr=None, t=None):
        self.expr = expr
        self.t = t
        super().__init__(message)
