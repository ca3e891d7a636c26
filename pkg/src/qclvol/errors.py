"""Exception hierarchy shared by all qclvol modules."""


class QclVolError(Exception):
    """Base class for domain errors raised by this package."""


class InvalidArgumentError(QclVolError, ValueError):
    pass


class DegenerateSeriesError(QclVolError, ValueError):
    """A series has zero spread where a normalization needs it."""


class DegenerateScaleError(DegenerateSeriesError):
    pass


class NonPositiveDenominatorError(QclVolError, ArithmeticError):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class InsufficientDataError(QclVolError, ValueError):
    pass


class DegenerateSegmentError(QclVolError, ArithmeticError):
    def __init__(self, message, segment=None, scale=None):
        super().__init__(message)
        self.segment = segment
        self.scale = scale


class NonFiniteObjectiveError(QclVolError, ArithmeticError):
    def __init__(self, message, params=None):
        super().__init__(message)
        self.params = params


class DataFormatError(QclVolError, ValueError):
    """Malformed input file; carries the offending line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
