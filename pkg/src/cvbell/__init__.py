"""Multiphoton Bell-type inequality for four-mode continuous-variable optics."""
from .errors import (
    CvbellError,
    IllConditionedError,
    InvalidArgumentError,
    NumericalFailureError,
    ResourceLimitError,
    TruncationError,
)

__version__ = "0.1.0"
