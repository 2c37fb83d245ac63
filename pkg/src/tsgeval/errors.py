"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class TsgError(Exception):
    exit_code = 1


class InputError(TsgError):
    """Missing, unreadable or unparsable input."""

    exit_code = 2


class FormatError(InputError):
    """Binary tensor header is not a recognised TSGT header."""


class TruncatedError(FormatError):
    """Payload shorter (or longer) than the header promises."""


class ShapeError(TsgError, ValueError):
    """Tensor shapes violate an operation's contract."""

    exit_code = 3


class SplitError(ShapeError):
    pass


class PairingError(ShapeError):
    pass


class ParameterError(TsgError, ValueError):
    exit_code = 3


class DegenerateError(TsgError, ValueError):
    """Numerically degenerate input (zero variance, empty sets, ...)."""

    exit_code = 4
