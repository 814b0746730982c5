"""Exception types shared across the package."""


class QuadcatError(Exception):
    """Base class for numerical failures raised by this package."""


class TruncationError(QuadcatError):
    """The requested state does not fit in the truncated space within tail_tol."""


class ZeroNormError(QuadcatError):
    """A state or outcome has numerically vanishing norm (below 1e-14)."""


class TraceLossError(QuadcatError):
    """A loss channel lost more trace than its Kraus cutoff can account for."""


class NonPositiveError(QuadcatError):
    """A density matrix has an eigenvalue too negative to be rounding noise."""
