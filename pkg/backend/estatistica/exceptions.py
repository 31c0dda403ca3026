class InferenceError(Exception):
    """Base class for every error raised by the statistics engine."""


class DomainError(InferenceError, ValueError):
    """An argument lies outside the domain of the operation."""


class NonPositiveValueError(DomainError):
    """
    Raised when a log transform meets a value that is zero or negative.

    Attributes:
        index (int): Position of the offending value in the sample.
        value (float): The offending value.
    """

    def __init__(self, index: int, value: float, label: str = ''):
        self.index = index
        self.value = value
        where = f' in sample "{label}"' if label else ''
        super().__init__(
            f'log transform undefined: value {value!r} at index {index}{where} is not positive'
        )


class InsufficientDataError(InferenceError, ValueError):
    """Not enough observations for a variance-based operation."""


class DegenerateVarianceError(InferenceError, ArithmeticError):
    """Zero variance where a nonzero one is required."""


class InfiniteEffectError(DegenerateVarianceError):
    """The standardizer is zero while the raw difference is not."""


class ConvergenceError(InferenceError, ArithmeticError):
    """An iterative numeric routine failed to converge."""


class ConfigError(InferenceError, ValueError):
    """An analysis configuration value is invalid."""


class InputFormatError(InferenceError, ValueError):
    """
    Malformed tabular input.

    Attributes:
        row (int | None): File line number (header is row 1).
        column (str | None): Column name.
    """

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        self.row = row
        self.column = column
        if row is not None and column is not None:
            message = f'row {row}, column {column}: {message}'
        elif row is not None:
            message = f'row {row}: {message}'
        super().__init__(message)


class LengthMismatchError(InferenceError, ValueError):
    """Paired samples of different lengths."""
