"""Exception types raised across meanlab."""


class MeanlabError(Exception):
    """Base class for every error raised by this package."""


class InputError(MeanlabError, ValueError):
    """Malformed input: wrong shape, mismatched dimensions, degenerate basis."""


class DomainError(MeanlabError, ValueError):
    """Input outside the mathematical domain of the operation."""


class ConsistencyError(MeanlabError, ArithmeticError):
    """Two independent evaluations of the same quantity disagree."""


class ResolutionError(MeanlabError, ArithmeticError):
    """Requested accuracy is not reachable with the given truncation or grid."""


class UnsupportedPairingError(MeanlabError, ValueError):
    """Operator norm requested for a norm pairing with no exact or certified method."""


class NotInvertibleError(MeanlabError, ArithmeticError):
    """No contracting power was found, so invertibility cannot be certified."""


class SingularError(MeanlabError, ArithmeticError):
    """Matrix is singular, or numerically too close to singular."""

    def __init__(self, message, nearest=None):
        super().__init__(message)
        self.nearest = nearest


class AliasingError(MeanlabError, ValueError):
    """Grid too coarse for the requested Fourier degree."""


class DepthError(MeanlabError, ValueError):
    """Shift-space truncation depth is too small for the requested orbit."""

    def __init__(self, message, needed):
        super().__init__(message)
        self.needed = needed
