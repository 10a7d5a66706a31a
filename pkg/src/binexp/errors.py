"""Exception hierarchy shared by all modules."""


class BinexpError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(BinexpError, ValueError):
    """Bad argument, violated precondition or malformed input file."""


class DomainError(ValidationError):
    """Argument outside the domain of a function."""


class InfeasibleError(ValidationError):
    """Constraint set is empty."""


class ShapeError(ValidationError):
    """A function lacks a required shape property (convexity, monotonicity)."""


class DivergenceError(BinexpError, ArithmeticError):
    """An optimisation or integral is unbounded."""


class NumericError(BinexpError, ArithmeticError):
    """A numerical routine failed to produce a usable value."""


class PreconditionError(ValidationError):
    """An argument lacks a structural property an operation requires."""
