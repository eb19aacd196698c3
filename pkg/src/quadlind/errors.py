"""Exception hierarchy.

Validation errors map to CLI exit status 1, numerical failures to 2.
"""


class QuadlindError(Exception):
    """Base class for all package errors."""

    exit_code = 2


class ValidationError(QuadlindError, ValueError):
    """Input violates a model or parameter invariant."""

    exit_code = 1


class ClosedFormError(ValidationError):
    """The XX-chain closed form does not apply to the given parameters."""


class NumericalError(QuadlindError, ArithmeticError):
    """A numerical stage failed or produced untrustworthy output."""

    exit_code = 2


class MarginalSteadyStateError(NumericalError):
    """Some rapidity pair sum vanishes, so the steady state is not unique."""


class IllConditionedError(NumericalError):
    pass


class OracleSizeError(ValidationError):
    pass
