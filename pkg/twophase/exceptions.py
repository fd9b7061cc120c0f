"""
Exception hierarchy for the two-phase conductor toolkit

Every error raised by the library derives from TwoPhaseError and carries the
exit code the command-line frontend reports for it.
"""
from typing import Optional


EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SOLVER = 2


class TwoPhaseError(Exception):
    """Base exception for the toolkit"""
    def __init__(self, message: str, exit_code: int = EXIT_SOLVER):
        self.message = message
        self.exit_code = exit_code
        super().__init__(self.message)


class ValidationError(TwoPhaseError):
    """Invalid user input (arguments, documents, configuration)"""
    def __init__(self, message: str = "Validation error"):
        super().__init__(message, EXIT_VALIDATION)


class DomainError(ValidationError):
    """Argument outside the mathematical domain of an operation"""
    def __init__(self, message: str = "Argument outside the domain"):
        super().__init__(message)


class DocumentError(ValidationError):
    """Malformed profile document"""
    def __init__(self, message: str = "Malformed document", field: Optional[str] = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class ConfigurationError(ValidationError):
    """Missing or unreadable configuration"""
    def __init__(self, message: str = "Invalid configuration"):
        super().__init__(message)


class SolverError(TwoPhaseError):
    """Numerical failure inside a solver"""
    def __init__(self, message: str = "Solver failure"):
        super().__init__(message, EXIT_SOLVER)


class RangeError(SolverError):
    """Argument outside the supported working range"""
    def __init__(self, message: str = "Argument outside the working range"):
        super().__init__(message)


class BracketingError(SolverError):
    """A root could not be isolated"""
    def __init__(self, message: str = "Root bracketing failed"):
        super().__init__(message)


class ConvergenceError(SolverError):
    """Iteration budget exhausted before reaching the tolerance"""
    def __init__(self, message: str = "Iteration did not converge"):
        super().__init__(message)


class QuadratureError(SolverError):
    """Adaptive quadrature failed to reach its tolerance"""
    def __init__(self, message: str = "Quadrature did not converge", error_estimate: float = float("nan")):
        self.error_estimate = error_estimate
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3e})")
