"""Exception hierarchy shared by every module of the package."""


class ChaosError(Exception):
    """Base class for all errors raised by this package."""


class ArityMismatch(ChaosError, ValueError):
    pass


class IndexOutOfRange(ChaosError, ValueError):
    pass


class StrategyExhausted(ChaosError, IndexError):
    """A finite strategy ran out of terms.

    ``position`` is the 0-based index of the term that was requested.
    """

    def __init__(self, position, message=None):
        self.position = position
        super().__init__(message or f"strategy exhausted at term {position}")


class ScaleLimitExceeded(ChaosError, ValueError):
    """An exhaustive routine was asked to work beyond its supported size."""


class TruthTableError(ChaosError, ValueError):
    pass


class TruthTableHeaderError(TruthTableError):
    pass


class TruthTableLineCountError(TruthTableError):
    pass


class TruthTableHexError(TruthTableError):
    pass


class NotCertified(ChaosError, ValueError):
    """The update function cannot be proven to give an invertible post-treatment."""


class FrameError(ChaosError, ValueError):
    """A stream frame does not have the configured width."""
