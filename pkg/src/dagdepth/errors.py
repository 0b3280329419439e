"""Exception hierarchy. CLI exit codes are attached to each class."""


class DagDepthError(Exception):
    exit_code = 1


class DomainError(DagDepthError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class SpecError(DagDepthError, ValueError):
    """Distribution spec invalid or unsupported by the requested operation."""


class EmptyError(DagDepthError, ValueError):
    pass


class RootError(DagDepthError, ValueError):
    """Tried to follow a parent edge out of the root."""


class NoRootError(DagDepthError, ArithmeticError):
    """A root-finder failed to bracket a level crossing."""


class CapacityError(DagDepthError, MemoryError):
    exit_code = 2


class BudgetError(DagDepthError, RuntimeError):
    exit_code = 2


class UnderpoweredError(DagDepthError, RuntimeError):
    """Too few Monte Carlo hits to fit a rate. ``estimate`` keeps the raw counts."""

    exit_code = 3

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate
