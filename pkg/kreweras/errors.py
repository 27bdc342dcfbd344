"""
Error hierarchy for the Kreweras toolkit.

Every failure raised by the package derives from KrewerasError so the CLI can
catch one type, log it and exit non-zero. Subclasses carry the context a
caller needs to replay the failing step (an index, a stage name, a command).
"""

from typing import Optional


class KrewerasError(Exception):
    """Base class for all toolkit errors."""


class ZeroDenominatorError(KrewerasError, ZeroDivisionError):
    """A rational number or rational function was built with denominator 0."""


class PrecisionError(KrewerasError):
    """A truncated series was asked for a coefficient it does not know."""


class NonUnitError(KrewerasError):
    """Inverse or square root requested for a non-unit leading coefficient."""


class IntegrationError(KrewerasError):
    """Integration of a series carrying a t^-1 term."""


class SubstitutionError(KrewerasError):
    """Argument substitution with q(0) != 0 or q' = 0."""


class FormatError(KrewerasError):
    """A text artifact could not be parsed."""


class ConfigError(KrewerasError):
    """Inconsistent or malformed configuration."""


class GuessingError(KrewerasError):
    """Not enough coefficients for the requested staircase cell."""


class KernelResidualError(KrewerasError):
    """The kernel equation residual has a nonzero coefficient."""

    def __init__(self, message: str, order: Optional[int] = None):
        super().__init__(message)
        self.order = order


class CertificateError(KrewerasError):
    """A certificate check failed."""

    def __init__(self, check: str, message: str, index: Optional[int] = None):
        super().__init__(f"{check}: {message}" + (f" (index {index})" if index is not None else ""))
        self.check = check
        self.index = index


class StageError(KrewerasError):
    """A pipeline stage failed; carries the stage name and its replay command."""

    def __init__(self, stage: str, replay: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause} (replay: {replay})")
        self.stage = stage
        self.replay = replay
        self.cause = cause


class OperatorError(KrewerasError):
    """Invalid operator construction (zero operator, unknown kind, no closure found)."""
