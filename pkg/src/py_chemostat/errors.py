"""Exception hierarchy for py-chemostat.

Every error derives from ``ChemostatError`` and from the builtin that best
describes it, so callers may catch either.
"""


class ChemostatError(Exception):
    """Base class for all py-chemostat errors."""


class DomainError(ChemostatError, ValueError):
    """An argument lies outside the domain of a function (e.g. a negative concentration)."""


class CapabilityError(ChemostatError, NotImplementedError):
    """A custom response was asked for a derivative order it does not provide."""


class NoBreakEvenError(ChemostatError, ValueError):
    """The removal rate cannot be balanced: ``Di >= gamma * sup(f)``."""


class ExistenceError(ChemostatError, ValueError):
    """A required equilibrium does not exist at the given feed concentration."""


class ContractViolationError(ChemostatError, ValueError):
    """A caller broke a documented precondition (e.g. ``a3 <= 0`` for Routh-Hurwitz)."""


class FactorizationDomainError(ChemostatError, ArithmeticError):
    """The cubic has no unambiguous (real root, pair) factorization."""

    def __init__(self, message: str, mu: float | None = None):
        if mu is not None:
            message = f"{message} (mu={mu!r})"
        super().__init__(message)
        self.mu = mu


class BracketError(ChemostatError, ValueError):
    """A root search was given an interval without a sign change."""


class ConvergenceError(ChemostatError, ArithmeticError):
    """An iterative solver stopped before meeting its tolerance."""


class TransversalityError(ChemostatError, ArithmeticError):
    """The crossing fails the speed condition or the third eigenvalue is not negative."""


class CrossCheckError(ChemostatError, ArithmeticError):
    """Two independent computations of the same crossing disagree."""


class PairCollisionError(ChemostatError, ArithmeticError):
    """The complex pair becomes real (discriminant >= 0) inside the bracket."""


class StiffnessError(ChemostatError, RuntimeError):
    """The integrator step size underflowed."""


class ModelViolationError(ChemostatError, RuntimeError):
    """A sampled state broke nonnegativity or the boundedness envelope."""


class ConfigError(ChemostatError, ValueError):
    """Invalid run configuration. The message starts with the offending field path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
