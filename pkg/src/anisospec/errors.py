"""Shared exception types."""


class ResolutionError(RuntimeError):
    """A grid is too coarse (or a window too small) to resolve the requested object."""


class CertificationError(RuntimeError):
    """A spectral certificate failed; carries the offending items."""

    def __init__(self, message, failing=()):
        super().__init__(message)
        self.failing = list(failing)
