"""Exception types shared across the package."""


class NilsepError(Exception):
    """Base class for all errors raised by this package."""


class PresentationError(NilsepError):
    """A presentation failed validation (parsing, consistency, weights)."""


class InconsistentPresentation(PresentationError):
    """Collection of an overlap did not return the identity normal form."""


class NotNilpotent(PresentationError):
    """The weight function does not certify a central series."""


class UnknownGenerator(NilsepError):
    """A word referred to a generator that is not part of the presentation."""


class NotNormal(NilsepError):
    """A quotient was requested by a subgroup that is not normal."""


class InfiniteGroup(NilsepError):
    """A finite-only operation (e.g. materialize) met an infinite group."""


class ExponentRequested(NilsepError):
    """exponent_of was called on an infinite subgroup."""


class NoRootFound(NilsepError):
    """The bounded root solve proved that no root exists."""


class InsideIsolator(NilsepError):
    """separate() was asked to split off an element that has a root in the
    subgroup; the refusal carries the certifying witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class BadIndex(NilsepError):
    """A witness construction needs a finite quotient whose order is a
    number over the prescribed primes, and the input quotient is not one."""


class HypothesisFailed(NilsepError):
    """A residual-criterion checker found a violated standing assumption."""


class NotStabilized(NilsepError):
    """A chain computation hit its hard cap before stabilizing."""

    def __init__(self, cap):
        super().__init__(f"chain did not stabilize within {cap} steps")
        self.cap = cap


class SearchBoundsExceeded(NilsepError):
    """A bounded witness search ran out of its configured grid.  The bounds
    are reported so the caller can retry; this is never a 'no' answer."""

    def __init__(self, message, bounds=None):
        super().__init__(message)
        self.bounds = bounds
