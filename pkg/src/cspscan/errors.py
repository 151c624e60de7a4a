"""Exception hierarchy shared across the package."""


class CspscanError(Exception):
    """Base class for all errors raised by this package."""


class InputError(CspscanError, ValueError):
    """Bad argument or violated operation precondition."""


class CapabilityError(CspscanError, RuntimeError):
    """Exact enumeration was requested beyond the supported size bound.

    Raised instead of silently falling back to a heuristic answer.
    """


class NetworkFormatError(CspscanError, ValueError):
    """Syntax or semantic error in a network file."""

    def __init__(self, message: str, line: int):
        super().__init__(message)
        self.line = line

    def __str__(self) -> str:
        return f"line {self.line}: {self.args[0]}"


class UnconstrainedVariableError(CspscanError, LookupError):
    """A variable has no directionally relevant constraints."""


class SoundnessError(CspscanError, RuntimeError):
    """A fired guarantee disagreed with the brute-force oracle.

    This never happens on a correct build; it exists so a disagreement
    crashes loudly instead of producing a wrong report.
    """
