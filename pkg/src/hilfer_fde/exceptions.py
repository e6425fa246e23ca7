class FdeError(Exception):
    """Base class for errors raised by hilfer_fde."""


class DomainError(FdeError, ValueError):
    pass


class ProblemError(FdeError, ValueError):
    """The equation or its initial data are malformed."""


class UnsupportedProblemError(ProblemError):
    pass


class GridError(FdeError, ValueError):
    pass


class TruncationError(FdeError, ArithmeticError):
    """Series truncation could not be certified within the layer budget."""

    def __init__(self, message, bound):
        super().__init__(f"{message} (best bound {bound:.3e})")
        self.bound = bound


class StepSizeError(FdeError, ArithmeticError):
    pass
