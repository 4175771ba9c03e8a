"""Exception hierarchy shared by all modules."""


class RVDCError(Exception):
    pass


class ZeroInverse(RVDCError, ZeroDivisionError):
    pass


class DimensionMismatch(RVDCError, ValueError):
    pass


class Singular(RVDCError, ValueError):
    pass


class IndexOutOfRange(RVDCError, IndexError):
    pass


class InvalidRank(RVDCError, ValueError):
    pass


class InvalidChallenge(RVDCError, ValueError):
    pass


class InvalidParams(RVDCError, ValueError):
    pass


class StreamExhausted(RVDCError, EOFError):
    pass


class PhaseViolation(RVDCError, RuntimeError):
    pass


class MalformedTranscript(RVDCError, ValueError):
    pass


class MalformedSignature(RVDCError, ValueError):
    """Raised when a signature or key encoding cannot be parsed.

    ``offset`` is the byte offset at which parsing failed, when known.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset
