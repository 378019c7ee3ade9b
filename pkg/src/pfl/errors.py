"""Exception hierarchy shared by every module."""


class PflError(Exception):
    """Base class for all errors raised by the package."""


class InputError(PflError, ValueError):
    """Malformed input: dimension mismatch, bad text, impossible factorization."""


class ChartMismatchError(InputError):
    """Objects living on different charts were combined."""


class PreconditionError(PflError):
    """A documented precondition of an operation does not hold."""


class RankNotConstantError(PreconditionError):
    """Rank at the base point differs from the generic rank."""

    def __init__(self, message: str, level: int | None = None):
        super().__init__(message)
        self.level = level


class InconsistencyError(PflError):
    """A computed object contradicts the hypotheses it was derived under."""


class ReductionError(PflError):
    """Input to the normal-form reduction is not in the required shape."""

    def __init__(self, message: str, level: int | None = None, generator: int | None = None):
        super().__init__(message)
        self.level = level
        self.generator = generator


class VerificationError(PflError):
    """An identity that must hold exactly failed (e.g. an inverse pair)."""

    def __init__(self, message: str, component: int | None = None):
        super().__init__(message)
        self.component = component


class InternalError(PflError):
    """Two independent computations disagree; indicates a bug."""
