"""Exception hierarchy for recordlab.

Every error raised deliberately by this package derives from
:class:`RecordLabError`, so callers can catch the whole family at once.
Errors that signal invalid *input* additionally derive from
:class:`ValueError`; errors that signal a *numerical* failure (a computation
that could not be completed to the requested quality) derive only from the
base class and are mapped to a distinct exit code by the CLI.
"""

from __future__ import annotations


class RecordLabError(Exception):
    """Base class for all recordlab errors."""


class ValidationError(RecordLabError, ValueError):
    """Base class for invalid-input errors."""


class NotPositiveDefinite(ValidationError):
    """A matrix required to be positive definite is not.

    Parameters
    ----------
    message : str
        Human-readable description.
    minor_index : int, optional
        1-based order of the failing leading principal minor, when known
        (as reported by the Cholesky factorization).
    """

    def __init__(self, message: str, minor_index: int | None = None):
        if minor_index is not None:
            message = f"{message} (leading minor of order {minor_index} not positive)"
        super().__init__(message)
        self.minor_index = minor_index


class RankDeficient(ValidationError):
    """An affine map that must have full row rank does not."""


class EmptyPartition(ValidationError):
    """A conditioning index set or its complement is empty or invalid."""


class DimensionCap(ValidationError):
    """A Gaussian integral exceeds the configured dimension cap."""


class DegenerateCorrelation(ValidationError):
    """A correlation needed with modulus strictly below one has |r| = 1."""


class InvalidGamma(ValidationError):
    """The record-law matrix construction produced an inadmissible matrix."""


class InvalidTimes(ValidationError):
    """An arrival-time tuple is not strictly increasing from an index >= 2."""


class InvalidDeltaMatrix(ValidationError):
    """A Hsing-type delta map yields an invalid correlation structure."""


class MissingDelta(ValidationError):
    """A required lag is absent from a Hsing-type delta map."""


class AllZeroCoefficients(ValidationError):
    """A moving-average coefficient sequence is identically zero."""


class InsufficientExceedances(ValidationError):
    """Too few threshold exceedances to estimate an extremal index."""


class SubsetExplosion(ValidationError):
    """A component-subset sum over 2^d (or 3^d) terms exceeds the d cap."""


class DegenerateNormalization(RecordLabError):
    """A conditional law's normalizing probability is numerically zero."""


class AcceptanceTooLow(RecordLabError):
    """A rejection sampler's acceptance probability is impractically small."""


class TailNotConverged(RecordLabError):
    """A series was cut off by the term budget before its tail converged."""
