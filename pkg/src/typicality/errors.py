"""Exception hierarchy shared by every module of the package."""


class TypicalityError(Exception):
    """Base class for all errors raised by :mod:`typicality`."""


class DomainError(TypicalityError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class RegimeError(TypicalityError, ValueError):
    """A formula was requested outside the dimension ordering it needs.

    The factorised mutual-information forms require ``d_A * d_B <= d_E``.
    """


class QuadratureError(TypicalityError, ArithmeticError):
    """Adaptive integration hit its subdivision budget.

    The best available estimate is kept on ``result`` so callers can decide
    whether it is good enough.
    """

    def __init__(self, message, result):
        super().__init__(message)
        self.result = result


class ConvergenceError(TypicalityError, ArithmeticError):
    """An iterative routine (continued fraction, Jacobi sweeps) did not converge."""


class InsufficientSamplesError(TypicalityError, ValueError):
    """Too few Monte Carlo samples for the requested statistic."""
