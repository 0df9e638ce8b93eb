"""Exception types shared across the package."""


class TofError(Exception):
    """Base class for all errors raised by tofalg."""


class WidthMismatch(TofError, ValueError):
    pass


class IndexOutOfRange(TofError, IndexError):
    pass


class TargetInControls(TofError, ValueError):
    pass


class CapExceeded(TofError):
    """Raised when exhaustive evaluation would exceed the configured wire cap."""


class NotPolynomialForm(TofError, ValueError):
    pass


class NotIdempotent(TofError, ValueError):
    pass


class StaleMatch(TofError):
    pass


class PatternMismatch(TofError, ValueError):
    pass


class ParseError(TofError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
