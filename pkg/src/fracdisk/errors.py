"""Exception types raised by fracdisk."""


class BasisIndexError(ValueError):
    """An (l, n, mu) triple outside the disk basis, e.g. (0, n, -1)."""


class ResolutionError(ValueError):
    """Quadrature or truncation too coarse for the requested accuracy."""


class TruncationError(ValueError):
    """Right-hand side touches a coupling chain beyond the solved range."""


class NotSPDError(ValueError):
    """Matrix handed to a symmetric positive definite solver is not SPD."""
