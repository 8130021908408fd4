"""Exception hierarchy shared by all modules."""


class QdentError(Exception):
    """Base class for errors raised by qdent."""


class InvalidParameterError(QdentError, ValueError):
    """A physical parameter or configuration value is out of its domain."""


class InvalidStateError(QdentError, ValueError):
    """A state vector or density matrix fails validation."""


class NumericalError(QdentError, ArithmeticError):
    """A numerical routine could not reach its accuracy target."""


class StepUnderflowError(NumericalError):
    """Adaptive integration needed a step below the allowed minimum."""


class DivergenceError(NumericalError):
    """The requested integral does not converge."""
