"""Exception hierarchy.

Every error raised by the library derives from :class:`CompetPropError`,
which itself is a ``ValueError`` so callers validating user input can catch
the builtin type.
"""


class CompetPropError(ValueError):
    pass


# graph construction
class NotSymmetricError(CompetPropError):
    pass


class SelfLoopError(CompetPropError):
    pass


class DisconnectedError(CompetPropError):
    pass


class IsolatedNodeError(CompetPropError):
    pass


class NotRowStochasticError(CompetPropError):
    pass


class NegativeEntryError(CompetPropError):
    pass


class DimensionMismatchError(CompetPropError):
    pass


class PeriodicOrReducibleError(CompetPropError):
    pass


class InvariantViolationError(CompetPropError):
    """A probability state drifted outside its domain by more than rounding."""


class NotConvergedError(CompetPropError):
    """Iteration hit its cap. Carries the last iterate and residual."""

    def __init__(self, message, last=None, residual=None, iterations=None):
        super().__init__(message)
        self.last = last
        self.residual = residual
        self.iterations = iterations


# markov simulation
class InvalidInitialDistributionError(CompetPropError):
    pass


# analysis
class ParameterOrderError(CompetPropError):
    """delta22 < delta11; relabel the two products first."""


class NoPositiveColumnError(CompetPropError):
    pass


class WrongCaseError(CompetPropError):
    pass


class AssumptionViolatedError(CompetPropError):
    def __init__(self, failed):
        self.failed = list(failed)
        super().__init__("assumptions violated: " + "; ".join(self.failed))


# games
class BudgetConditionError(CompetPropError):
    pass


class ZeroQualityError(CompetPropError):
    pass


# experiments
class GenerationFailedError(CompetPropError):
    def __init__(self, message, attempts=None):
        super().__init__(message)
        self.attempts = attempts


class ConfigInvalidError(CompetPropError):
    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
