"""Exception types raised across the package."""


class PmlkitError(Exception):
    """Base class for all pmlkit errors."""


class EmptyInput(PmlkitError):
    pass


class DuplicateFrequency(PmlkitError):
    pass


class InvalidEntry(PmlkitError):
    pass


class InvalidSampleSize(PmlkitError):
    pass


class EmptyGrid(PmlkitError):
    pass


class BelowGrid(PmlkitError):
    pass


class ShapeError(PmlkitError):
    pass


class DomainError(PmlkitError):
    pass


class Infeasible(PmlkitError):
    pass


class NonConvergence(PmlkitError):
    """Solver ran out of iterations; carries the last certified gap."""

    def __init__(self, message, gap):
        super().__init__(message)
        self.gap = gap


class SparsifyUnsupported(PmlkitError):
    pass


class SwapInfeasible(PmlkitError):
    pass


class TransInfeasible(PmlkitError):
    pass


class RoundPreconditionError(PmlkitError):
    pass


class CreatePreconditionError(PmlkitError):
    pass


class NotIntegral(PmlkitError):
    pass


class BudgetExceeded(PmlkitError):
    pass
