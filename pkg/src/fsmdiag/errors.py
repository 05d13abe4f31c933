"""Exception hierarchy shared by all fsmdiag modules."""


class FsmDiagError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(FsmDiagError):
    """A model file does not conform to the fsm v1 text format."""


class UsageError(FsmDiagError):
    """An operation was invoked with arguments outside its contract."""


class PreconditionError(FsmDiagError):
    """The machine does not satisfy the standing assumptions an
    operation relies on (liveness, silent-state restrictions, ...)."""


class InconsistentObservationError(FsmDiagError):
    """An observed output stream is not producible by the machine."""


class BudgetExceededError(FsmDiagError):
    """An enumeration would exceed the configured resource budget."""
