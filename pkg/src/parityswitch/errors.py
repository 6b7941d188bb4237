"""Exception hierarchy.

Errors are grouped by how a caller (and the CLI) should react: bad input,
numerical trouble, or a failed calibration.
"""


class ParitySwitchError(Exception):
    """Base class for all package errors."""


class ValidationError(ParitySwitchError, ValueError):
    """Input does not satisfy an operation's preconditions."""


class InvalidParameterError(ValidationError):
    """A physical parameter is out of its allowed range."""


class ConfigurationError(ValidationError):
    """Numerical settings are inconsistent (e.g. truncation too small)."""


class DomainError(ValidationError):
    """A formula is evaluated outside its domain of validity."""


class ContractError(ValidationError):
    """A required operating condition is not met."""


class TuningRangeError(ValidationError):
    """A requested frequency cannot be reached with the given junction asymmetry."""


class UnitError(ValidationError):
    """A quantity was given in the wrong unit."""


class NumericalError(ParitySwitchError, ArithmeticError):
    """A numerical procedure could not produce a trustworthy result."""


class AmbiguousBasisError(NumericalError):
    """Dressed states cannot be labelled unambiguously."""


class NoIdlingPointError(NumericalError):
    """No zero of the ZZ rate in the search window."""


class SingularDenominatorError(NumericalError):
    """A perturbative expression hits a resonance."""


class IntegrationAccuracyError(NumericalError):
    """Time integration violated its accuracy contract."""


class IdlingConfigurationError(NumericalError):
    """Quantity undefined because the static ZZ rate vanishes."""


class CalibrationError(ParitySwitchError):
    """Pulse calibration failed; best parameters found are attached."""

    def __init__(self, message, best=None, infidelity=None):
        super().__init__(message)
        self.best = best
        self.infidelity = infidelity
