"""Exception hierarchy shared by all blacklining modules."""


class BlackliningError(Exception):
    """Base class for every error raised by this package."""


class ParseError(BlackliningError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class OrderError(BlackliningError):
    """Timestamps decrease somewhere in the input."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TraceIOError(BlackliningError, OSError):
    pass


class InsufficientData(BlackliningError):
    """The input is shorter than the operation's minimum length."""


class EmptyInput(BlackliningError):
    pass


class InvalidParams(BlackliningError, ValueError):
    pass


class RankDeficient(BlackliningError):
    """Too few distinct abscissae for the requested polynomial degree."""


class DegreeTooHigh(BlackliningError):
    pass


class InvalidInterval(BlackliningError, ValueError):
    pass


class EmptyCorpus(BlackliningError):
    pass


class CorpusIntegrityError(BlackliningError):
    """A corpus file no longer matches the digest recorded in its manifest."""
