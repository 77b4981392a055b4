"""Exception hierarchy shared across the valuation engine.

Every domain error derives from :class:`ValuationError` and carries a
machine-readable ``code`` (the class name) used by the CLI when emitting
structured error output.
"""


class ValuationError(Exception):
    """Base class for all errors raised by this package."""

    @property
    def code(self) -> str:
        return type(self).__name__


class InvalidParams(ValuationError):
    """Market parameters violate their admissibility constraints."""


class InvalidSpec(ValuationError):
    """A contract specification violates its invariants."""


class NegativeSpread(InvalidSpec):
    """Mortgage rate does not exceed the risk-free rate."""


class InvalidTime(ValuationError):
    """Schedule time outside the contract's life [0, T]."""


class NoBracket(ValuationError):
    """Root finding requested on an interval without a sign change."""


class MaxIterExceeded(ValuationError):
    """Iteration budget exhausted before reaching the requested tolerance."""


class UnsupportedRegime(ValuationError):
    """Parameter combination for which no closed-form solution exists."""


class InvalidPhi(ValuationError):
    """Foreclosure cost fraction outside [0, 1)."""


class Degenerate(ValuationError):
    """The requested quantity is not defined at this point (zero sensitivity)."""


class NotConverged(ValuationError):
    """Iterative grid solver stopped before meeting its tolerance."""


class InvalidThresholds(ValuationError):
    """Stopping thresholds are not ordered or not positive."""


class InvalidHorizon(ValuationError):
    """Simulation horizon too short for a perpetual-contract truncation."""
