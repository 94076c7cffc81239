"""Exception hierarchy. Everything raised deliberately derives from KDError."""

from __future__ import annotations


class KDError(ValueError):
    """Base class for library errors."""


class InvalidDimensionError(KDError):
    pass


class DimensionMismatchError(KDError):
    pass


class DegenerateStateError(KDError):
    pass


class InvalidStateError(KDError):
    pass


class DegenerateObservableError(KDError):
    pass


class IndexOutOfRangeError(KDError, IndexError):
    pass


class CorruptTableError(KDError):
    """A KD table whose marginals carry a non-negligible imaginary residue."""


class NonInvertibleConfigurationError(KDError):
    """Raised when some overlap <f_j|a_i> is (numerically) zero."""

    def __init__(self, i: int, j: int, overlap: float):
        self.i = i
        self.j = j
        self.overlap = overlap
        super().__init__(
            f"bases are not mutually non-orthogonal: |<f_{j}|a_{i}>| = {overlap:.3e} at (i={i}, j={j})"
        )


class ImpossiblePostselectionError(KDError):
    """Postselection with (numerically) zero success probability."""

    def __init__(self, message: str, probability: float):
        self.probability = probability
        super().__init__(message)


class OrthogonalPostselectionError(ImpossiblePostselectionError):
    pass


class InvalidPointerError(KDError):
    pass


class GridPointError(KDError):
    """Wraps a failure at one point of a sweep grid."""

    def __init__(self, index: int, cause: Exception):
        self.index = index
        self.cause = cause
        super().__init__(f"grid point {index}: {cause}")
