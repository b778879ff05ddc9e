"""Exception types shared across the package."""


class TwotimeError(Exception):
    """Base class for all package-specific errors."""


class ZeroRelativeMotion(TwotimeError):
    """Raised when a scattering channel has no relative kinetic energy (v == V)."""


class SingularMatch(TwotimeError):
    """Raised when the boundary-matching linear system is numerically singular.

    The message carries the measured condition number.
    """


class InvalidMode(TwotimeError):
    """Raised for well mode indices n < 1."""


class StepTooCoarse(TwotimeError):
    """Raised when a finite-difference fallback disagrees with its refined stencil."""


class TooFewFringes(TwotimeError):
    """Raised when a fringe window contains fewer than three usable maxima."""


class DivisionByZeroWidth(TwotimeError):
    """Raised when a velocity-distribution width of zero is passed to an estimator."""


class ParseError(TwotimeError):
    """Raised for malformed configuration text; carries line/column position."""


class ValidationError(TwotimeError):
    """Raised when a parsed configuration violates the schema; names the field."""
