"""Exception hierarchy shared by all resokit modules.

Two failure families matter to callers (and to the CLI exit codes):
validation problems in user-supplied data (bad values, malformed files)
and numerical failures of an otherwise well-posed computation.
"""


class ResokitError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(ResokitError):
    """Invalid input value, precondition violation or inconsistent config."""


class ParseError(ValidationError):
    """Malformed input file. Carries the offending line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericsError(ResokitError):
    """A numerical procedure failed (no convergence, no feature found)."""


class NoResonanceError(NumericsError):
    """No usable resonance feature in the supplied data or search range."""


class PassbandUnresolvedError(NumericsError):
    """A filter response has no resolvable 3-dB passband on the given grid."""
