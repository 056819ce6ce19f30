"""Exception hierarchy shared by every module."""


class ClusterError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(ClusterError, ValueError):
    pass


class InexactDivision(ClusterError, ArithmeticError):
    pass


class RankError(ClusterError, ValueError):
    pass


class NotPointed(ClusterError, ValueError):
    pass


class NotNormalized(ClusterError, ValueError):
    pass


class SeedInvariantError(ClusterError, ValueError):
    """A seed violates one of its structural invariants."""

    def __init__(self, invariant, message):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class IncompatiblePair(SeedInvariantError):
    def __init__(self, message):
        super().__init__("compatible-pair", message)


class FrozenMutation(ClusterError, ValueError):
    pass


class BadFreeze(ClusterError, ValueError):
    pass


class BadWord(ClusterError, ValueError):
    pass


class DomainError(ClusterError, ValueError):
    """An element is not dominated by the requested degree."""


class NotInSpan(ClusterError, ValueError):
    pass


class UnsupportedRank(ClusterError, NotImplementedError):
    pass


class BadBasePoint(ClusterError, ValueError):
    pass


class NotFound(ClusterError):
    """A bounded search ended without a witness.

    This is an inconclusive outcome, never a refutation.
    """

    def __init__(self, message, depth=None):
        super().__init__(message)
        self.depth = depth


class TheoremViolation(ClusterError):
    """A computed instance contradicts a statement that is known to hold."""
