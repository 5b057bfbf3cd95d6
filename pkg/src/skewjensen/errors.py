"""Exception hierarchy shared by every module."""


class SkewJensenError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(SkewJensenError, ValueError):
    """Unknown names, invalid flags, or inconsistent problem settings."""


class DomainError(SkewJensenError, ValueError):
    """An argument lies outside the domain of a generator or a family."""


class ParseError(SkewJensenError, ValueError):
    """Malformed input file; the message carries the row/column location."""


class NumericalError(SkewJensenError, ArithmeticError):
    """An iteration broke a guarantee it is supposed to keep."""
