"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A parameter is outside its documented range."""


class DuplicateEdgeError(ValueError):
    """An edge was applied to a graph that already contains it."""


class ExhaustedStreamError(RuntimeError):
    """The edge stream ended before the requested condition was reached."""


class ContractViolationError(RuntimeError):
    """An operation was called outside its documented protocol."""


class InvalidRotationError(ValueError):
    """A rotation was requested with a missing chord or bad pivot index."""


class SizeLimitError(ValueError):
    """Input exceeds the hard size limit of an exact algorithm."""


class EngineInvariantError(RuntimeError):
    """An internal invariant of the cycle-finding engine failed."""
