"""Exception hierarchy shared by all fraclap modules."""


class FracLapError(Exception):
    """Base class for every error raised by fraclap."""


class DomainError(FracLapError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class NotInLalphaError(DomainError):
    """The function does not have a finite weighted tail integral."""


class SingularityError(DomainError):
    """Evaluation requested exactly at a kernel singularity."""


class UnsupportedRegimeError(DomainError):
    """The parameter combination is not covered (e.g. Riesz kernel with n <= alpha)."""


class DivergenceError(FracLapError, ArithmeticError):
    """An improper integral was declared or detected to diverge."""


class EvaluationError(FracLapError, ArithmeticError):
    """An integrand produced a non-finite value."""


class ConsistencyError(FracLapError, RuntimeError):
    """An internal consistency check failed (e.g. imaginary FFT residue)."""


class AccuracyError(FracLapError, ArithmeticError):
    """Quadrature did not reach the requested tolerance.

    The best available estimate and its error bound are attached so callers
    can decide whether the partial result is usable.
    """

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SolverError(FracLapError, RuntimeError):
    """The linear system of a discretized problem could not be solved."""
