"""Exception hierarchy shared across the package.

DomainError covers user-facing misuse (bad inputs, bad configs, degenerate
ensembles); InternalCheckError covers violated internal consistency checks
(dual-path disagreement, synthesis residuals). The CLI maps DomainError to
exit code 1 and everything else unexpected to exit code 2.
"""


class DmvError(Exception):
    """Base class for all package errors."""


class DomainError(DmvError):
    """Invalid input or unsatisfiable request."""


class PauliParseError(DomainError):
    """Malformed Pauli string; carries the offending position."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class CapacityError(DomainError):
    """Dense representation requested above the configured qubit limit."""


class DegenerateEnsembleError(DomainError):
    """Ensemble coefficients cancel; the encoded state has no norm."""


class UnstableRatioError(DomainError):
    """Denominator estimate too close to zero for the ratio estimator."""

    def __init__(self, message: str, breakdown=None):
        super().__init__(message)
        self.breakdown = breakdown


class ValidationError(DomainError):
    """Config validation failure; carries every violation found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("config validation failed:\n" + "\n".join(
            f"  - {v}" for v in self.violations))


class InternalCheckError(DmvError):
    """An internal consistency assertion failed; indicates a bug."""
