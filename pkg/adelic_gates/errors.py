"""
Exceptions and failure patterns for the adelic_gates library.

Every error raised by the library derives from AdelicGatesError and from the
builtin exception it refines, so callers can catch either. The batch front-end
turns exceptions into exit codes through the FailurePatternRegistry below:
parse problems exit with 2, precondition failures with 3.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Type

import pydantic

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_PARSE = 2
EXIT_PRECONDITION = 3


# --------------------------------------------------------------------------- #
# Exceptions                                                                  #
# --------------------------------------------------------------------------- #
class AdelicGatesError(Exception):
    """Base exception for adelic_gates errors."""
    pass

class InvalidPrimeError(AdelicGatesError, ValueError):
    """Raised when a modulus that must be prime is not."""
    pass

class PrecisionError(AdelicGatesError, ValueError):
    """Raised for precision exponents below 1 or mismatched precisions."""
    pass

class PrimeMismatchError(AdelicGatesError, ValueError):
    """Raised when values over different primes are combined."""
    pass

class NotAUnitError(AdelicGatesError, ValueError):
    """Raised when a p-adic unit is required but the value is divisible by p."""
    pass

class UnsupportedPrimeError(AdelicGatesError, ValueError):
    """Raised for p = 2 where the generator theory only covers odd primes."""
    pass

class DimensionError(AdelicGatesError, ValueError):
    """Raised when matrix or state shapes do not fit together."""
    pass

class NotInvertibleError(AdelicGatesError, ValueError):
    """Raised when a gate is required to lie in GL but does not."""
    pass

class NormalizationError(AdelicGatesError, ValueError):
    """Raised when a state must be normalized and is not."""
    pass

class QubitIndexError(AdelicGatesError, IndexError):
    """Raised for repeated or out-of-range qubit / coordinate indices."""
    pass

class NonCompactGateError(AdelicGatesError, ValueError):
    """Raised when a gate is not unitary/orthogonal within tolerance."""
    pass

class BudgetExceededError(AdelicGatesError, RuntimeError):
    """Raised when an enumeration would exceed its element budget."""
    pass

class FormatError(AdelicGatesError, ValueError):
    """Raised when a text token or input file cannot be parsed."""
    pass


# --------------------------------------------------------------------------- #
# Failure patterns                                                            #
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class FailurePattern:
    """Maps an exception type to an error code and a process exit code"""
    exception: Type[BaseException]
    error_code: str  # Unique error code
    exit_code: int
    description: str  # Human-readable description of the failure
    recovery_hint: Optional[str] = None


class FailurePatternRegistry:
    """Ordered registry of failure patterns; the first matching pattern wins."""

    def __init__(self, patterns: Optional[List[FailurePattern]] = None):
        self.patterns: List[FailurePattern] = list(patterns or [])

    def register(self, pattern: FailurePattern) -> None:
        self.patterns.append(pattern)

    def classify(self, exc: BaseException) -> FailurePattern:
        """
        Find the failure pattern for an exception.

        Args:
            exc: The exception raised by a command

        Returns:
            The first registered pattern whose exception type matches, or the
            catch-all UNEXPECTED pattern
        """
        for pattern in self.patterns:
            if isinstance(exc, pattern.exception):
                return pattern
        return UNEXPECTED_PATTERN

    def describe(self, exc: BaseException) -> Dict[str, object]:
        pattern = self.classify(exc)
        return {
            "error_code": pattern.error_code,
            "exit_code": pattern.exit_code,
            "message": str(exc),
            "recovery_hint": pattern.recovery_hint,
        }


UNEXPECTED_PATTERN = FailurePattern(
    exception=Exception,
    error_code="UNEXPECTED",
    exit_code=EXIT_UNEXPECTED,
    description="Unexpected internal error",
)

pattern_registry = FailurePatternRegistry([
    FailurePattern(FormatError, "PARSE_ERROR", EXIT_PARSE,
                   "Input text or file could not be parsed",
                   "Check the token format (e.g. 5^3:63, P-^2) and the JSON layout"),
    FailurePattern(pydantic.ValidationError, "SCHEMA_ERROR", EXIT_PARSE,
                   "Input file does not match the expected schema",
                   "Compare the file against the documented matrix/circuit layout"),
    FailurePattern(NotInvertibleError, "NOT_IN_GL", EXIT_PRECONDITION,
                   "Matrix is not invertible over the requested ring",
                   "Synthesis needs a unit determinant (GL_N(Z_p)) or det = ±1 (GL_N(Z))"),
    FailurePattern(UnsupportedPrimeError, "UNSUPPORTED_PRIME", EXIT_PRECONDITION,
                   "The generator set is only complete for odd primes",
                   "Use an odd prime"),
    FailurePattern(BudgetExceededError, "BUDGET_EXCEEDED", EXIT_PRECONDITION,
                   "Enumeration budget exceeded",
                   "Lower p or k, or raise --budget"),
    FailurePattern(NormalizationError, "NOT_NORMALIZED", EXIT_PRECONDITION,
                   "State is not normalized",
                   "Complex amplitudes must have unit norm"),
    FailurePattern(AdelicGatesError, "PRECONDITION", EXIT_PRECONDITION,
                   "Input violates an operation precondition"),
])
