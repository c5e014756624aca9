"""Exception hierarchy shared by the library and the CLI.

Each class carries the process exit code the CLI maps it to.
"""


class HibiError(Exception):
    exit_code = 1


class PosetParseError(HibiError, ValueError):
    """Malformed poset text. ``line`` and ``column`` are 1-based."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class InvalidPosetError(HibiError, ValueError):
    pass


class InvalidDegreesError(HibiError, ValueError):
    pass


class SizeGuardError(HibiError):
    exit_code = 4


class GateFailure(HibiError):
    """A formula failed to reproduce an independent oracle."""
    exit_code = 2


class NotSmoothableError(HibiError):
    exit_code = 2


class NoOperatorFound(HibiError):
    exit_code = 3


class AmbiguousOperator(HibiError):
    exit_code = 3
