"""Exception types raised by the audit engine."""


class AuditError(ValueError):
    """Base class for invalid inputs to any audit operation."""


class DimensionError(AuditError):
    """Dimension out of range, or two families of different dimension."""


class PreconditionError(AuditError):
    """An audit was requested on an input that violates its hypotheses."""


class DescriptorError(AuditError):
    """A family or step-function descriptor failed validation."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach its tolerance.

    ``estimate`` and ``error`` carry the best values reached.
    """

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
