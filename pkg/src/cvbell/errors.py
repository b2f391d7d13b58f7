"""Exception hierarchy shared by every backend."""


class CvbellError(Exception):
    """Base class for all errors raised by cvbell."""


class InvalidArgumentError(CvbellError, ValueError):
    pass


class IllConditionedError(CvbellError, ArithmeticError):
    def __init__(self, message, condition):
        super().__init__(f"{message} (condition number {condition:.3e})")
        self.condition = condition


class NumericalFailureError(CvbellError, ArithmeticError):
    pass


class TruncationError(CvbellError):
    """Probability mass above the Fock cutoff exceeded the allowed budget."""

    def __init__(self, message, tail):
        super().__init__(f"{message} (tail mass {tail:.3e})")
        self.tail = tail


class ResourceLimitError(CvbellError, MemoryError):
    pass
