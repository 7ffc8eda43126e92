"""Exception hierarchy shared across the package."""


class HypercutError(Exception):
    """Base class for all errors raised by hypercut."""


class InvalidHypergraph(HypercutError, ValueError):
    pass


class SubmodularityViolation(HypercutError, ValueError):
    pass


class NegativePenalty(HypercutError, ValueError):
    pass


class ZeroPenalty(HypercutError, ValueError):
    pass


class EmptySide(HypercutError, ValueError):
    pass


class IsolatedNode(HypercutError, ValueError):
    pass


class InvalidNodeWeights(HypercutError, ValueError):
    pass


class UnbalancedSides(HypercutError, ValueError):
    pass


class ConservationViolation(HypercutError):
    pass


class NotSaturating(HypercutError):
    pass


class MissingDecomposition(HypercutError):
    pass


class InternalBoundExceeded(HypercutError, RuntimeError):
    """A loop that is provably finite hit its safety cap."""


class EigenNoConvergence(HypercutError, RuntimeError):
    pass


class TooLarge(HypercutError, ValueError):
    """Instance exceeds the enumeration cap of a brute-force oracle."""
