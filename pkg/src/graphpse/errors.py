"""Exception types raised across the package.

Everything derives from :class:`GraphPSEError` (a ``ValueError``) so callers
can catch input problems in one place; the CLI maps these to exit code 1.
"""


class GraphPSEError(ValueError):
    pass


# graph construction / io
class IndexOutOfRange(GraphPSEError):
    pass


class SelfLoop(GraphPSEError):
    pass


class NotABijection(GraphPSEError):
    pass


class VirtualNodeAlreadyPresent(GraphPSEError):
    pass


class MalformedRecord(GraphPSEError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# numerics
class NotSymmetric(GraphPSEError):
    pass


class NoConvergence(GraphPSEError):
    pass


class NonPositiveTime(GraphPSEError):
    pass


class DisconnectedGraph(GraphPSEError):
    pass


class KTooLarge(GraphPSEError):
    pass


class EmptyConfig(GraphPSEError):
    pass


class NotNodeLevel(GraphPSEError):
    pass


# refinement / search
class LengthMismatch(GraphPSEError):
    pass


class GraphTooLarge(GraphPSEError):
    pass


# networks
class WidthMismatch(GraphPSEError):
    pass


class AlphaOutOfRange(GraphPSEError):
    pass


# generators
class BadSkip(GraphPSEError):
    pass


class InfeasibleDegree(GraphPSEError):
    pass


class RetriesExhausted(GraphPSEError):
    pass


class VerdictFailed(RuntimeError):
    """A verification that must hold by theory did not; signals a bug."""
