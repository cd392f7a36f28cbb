"""Exception types shared across the package."""


class RelMirrorError(Exception):
    """Base class for all errors raised by relmirror."""


class InvalidInputError(RelMirrorError, ValueError):
    """An input value is outside its documented domain (NaN/Inf, wrong sign, ...)."""


class DimensionMismatchError(InvalidInputError):
    """Two vectors (or a vector and an instance) have incompatible dimensions."""


class InvalidPolynomialError(RelMirrorError, ValueError):
    """Growth coefficients are empty, negative, or all zero."""


class NumericalFailureError(RelMirrorError, RuntimeError):
    """An iterative numerical procedure failed to converge.

    Carries the best bracket found so far in ``bracket`` (lo, hi) when the
    failure comes from root finding.
    """

    def __init__(self, message, bracket=None, iteration=None):
        super().__init__(message)
        self.bracket = bracket
        self.iteration = iteration


class ParseError(RelMirrorError, ValueError):
    """Malformed input text; ``line`` is the 1-based offending line number."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ReferenceDegeneracyError(RelMirrorError, RuntimeError):
    """A sampled pair exposed a degenerate Bregman distance (zero for x != y)."""


class ConfigError(RelMirrorError, ValueError):
    """A run configuration is incomplete or inconsistent."""
