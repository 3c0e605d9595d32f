"""Exception types raised across the package."""


class GapforgeError(Exception):
    """Base class for all package errors."""


class NonHermitianError(GapforgeError):
    """Matrix differs from its conjugate transpose beyond tolerance."""


class DimensionMismatchError(GapforgeError):
    """Matrix dimension inconsistent with the declared qubit support."""


class DuplicateIndexError(GapforgeError):
    """Qubit support contains a repeated index."""


class IndexOutOfRangeError(GapforgeError):
    """Qubit or eigenvalue index outside the valid range."""


class TooLargeError(GapforgeError):
    """Qubit count exceeds the dense-matrix cap (see GAPFORGE_NMAX)."""


class DimensionError(GapforgeError):
    """Operation undefined at this Hilbert-space dimension."""


class InvalidInputError(GapforgeError):
    """Input instance fails the validation the operation relies on."""


class TooManyInvalidError(GapforgeError):
    """Invalid-query count exceeds the exhaustive-enumeration cap."""


class PathTooDeepError(GapforgeError):
    """Adaptive machine did not halt within its declared query bound."""


class ConfigTooCoarseError(GapforgeError):
    """Search precision too coarse for the instance's promise gap."""


class NonConvergenceError(GapforgeError):
    """Search interval failed to shrink within its query budget."""


class ParseError(GapforgeError):
    """Instance file rejected; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str = ""):
        self.field = field
        super().__init__(message or f"invalid or missing field: {field!r}")
