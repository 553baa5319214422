"""Exception hierarchy shared by every module."""

from __future__ import annotations


class MemClusterError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(MemClusterError, ValueError):
    pass


class EmptyLabel(MemClusterError, ValueError):
    pass


class DuplicateDocument(MemClusterError):
    pass


class EmptyLog(MemClusterError):
    pass


# -- response parsing -------------------------------------------------------


class ResponseParseError(MemClusterError):
    """A reply could not be decoded into a primary assignment."""


class NoPrimaryLine(ResponseParseError):
    pass


class MultiplePrimaryLines(ResponseParseError):
    pass


class MalformedMerge(MemClusterError):
    """Raised internally for unparseable merge lines; the parser downgrades it to a warning."""


# -- transport --------------------------------------------------------------


class TransportError(MemClusterError):
    pass


class AuthError(MemClusterError):
    pass


class ProviderError(MemClusterError):
    def __init__(self, status: int, body: str):
        self.status = status
        self.body = body[:500]
        super().__init__(f"provider returned HTTP {status}: {self.body}")


class UnknownDocument(MemClusterError, KeyError):
    pass


# -- corpus / pipeline ------------------------------------------------------


class ParseError(MemClusterError, ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class DuplicateId(MemClusterError, ValueError):
    pass


class MissingText(MemClusterError, ValueError):
    pass


class CorruptLog(MemClusterError):
    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(f"event log corrupt at step {step}" + (f": {message}" if message else ""))


class ConfigMismatch(MemClusterError):
    pass


class MissingGold(MemClusterError):
    pass


class LengthMismatch(MemClusterError, ValueError):
    pass


class TooFewSamples(MemClusterError, ValueError):
    pass
