"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument violates the contract of the operation it was passed to."""


class StructuralError(ValueError):
    """A graph lacks a structural property the operation requires."""


class PolicyError(RuntimeError):
    """An exploration policy produced an action the current node cannot take."""


class BudgetError(RuntimeError):
    """A step cap was exhausted before the run reached a natural end.

    Distinguished from constraint violations: a violation is data recorded in
    the run report, a budget error means the run itself could not finish.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class InvariantViolation(RuntimeError):
    """An internal postcondition that should be unconditionally true failed."""
