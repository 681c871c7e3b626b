"""Shared exception types.

Everything raised on purpose by this package derives from SpherejackError,
so callers can catch one base class.  The subclasses also inherit from
ValueError because that is what a caller passing a bad argument to a plain
numerical routine would normally expect.
"""

__all__ = [
    "SpherejackError",
    "DomainError",
    "ValidationError",
    "CompatibilityError",
    "ResolutionError",
]


class SpherejackError(Exception):
    """Base class for all errors raised by spherejack."""


class DomainError(SpherejackError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidationError(SpherejackError, ValueError):
    """A parameter violates a structural precondition (sign, range, shape)."""


class CompatibilityError(SpherejackError, ValueError):
    """Two objects with different ambient dimensions were combined."""


class ResolutionError(SpherejackError, ValueError):
    """A grid is too coarse for the requested computation."""
