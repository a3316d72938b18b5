"""Exception types raised across the package."""


class QSPError(ValueError):
    """Base class for all validation and numerical failures.

    ``stage`` is filled in by the synthesis pipeline so callers can tell
    which step rejected the input.
    """

    stage = None

    def __init__(self, message, stage=None):
        super().__init__(message)
        if stage is not None:
            self.stage = stage


class AdmissibilityError(QSPError):
    """Target violates the parity or sup-norm requirement."""

    def __init__(self, message, reason, stage=None):
        super().__init__(message, stage)
        self.reason = reason


class ParityError(AdmissibilityError):
    def __init__(self, message, stage=None):
        super().__init__(message, "parity", stage)


class NormError(AdmissibilityError):
    def __init__(self, message, stage=None):
        super().__init__(message, "norm", stage)


class GapTooSmall(QSPError):
    """sup |b| on the circle is too close to 1 for the Weiss construction."""


class NonConvergent(QSPError):
    """An iterative or grid-refinement loop exhausted its budget."""

    def __init__(self, message, history=None, stage=None):
        super().__init__(message, stage)
        self.history = history


class DivisionDegenerate(QSPError):
    """Layer stripping hit a vanishing a*(0)."""


class SolverFailure(QSPError):
    """A Riemann-Hilbert linear solve left an unacceptable residual."""

    def __init__(self, message, k=None, stage=None):
        super().__init__(message, stage)
        self.k = k


class NonRealGamma(QSPError):
    """Sequence is not purely real (or imaginary) in the declared mode."""
