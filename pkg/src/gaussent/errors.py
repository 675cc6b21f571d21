"""Exception types raised across the package."""


class DomainError(ValueError):
    """Argument outside the physical or mathematical domain of an operation."""


class PurityError(DomainError):
    """A pure-state quantity was requested for a mixed state."""


class NotSymplecticError(DomainError):
    """Matrix fails the symplectic condition."""


class ConvergenceError(RuntimeError):
    """Multistart minimisation did not agree with itself.

    ``values`` holds the per-start optima so callers can inspect the spread.
    """

    def __init__(self, message, values=None):
        super().__init__(message)
        self.values = list(values) if values is not None else []


class TruncationError(RuntimeError):
    """Fock cutoff too small: probability leaked past the truncation edge."""


class NumericalConsistencyError(RuntimeError):
    """Moments that must be real came out with a non-negligible imaginary part."""


class DegenerateChannelError(RuntimeError):
    """Channel output carries no entanglement where a ratio needs a denominator."""
