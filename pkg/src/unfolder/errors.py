"""Exception hierarchy shared by the unfolding pipeline."""


class UnfolderError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(UnfolderError):
    pass


class ConvexityError(UnfolderError):
    def __init__(self, message, vertex=None):
        super().__init__(message)
        self.vertex = vertex


class DomainError(UnfolderError, ValueError):
    pass


class GeneralPositionError(UnfolderError):
    pass


class TreeError(UnfolderError):
    pass


class SearchExhausted(UnfolderError):
    def __init__(self, message, probes=()):
        super().__init__(message)
        self.probes = list(probes)


class InternalError(UnfolderError):
    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = list(trace)
