"""Exception hierarchy shared by every pipeline stage."""


class FodmError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 2


class ParseError(FodmError):
    """Input bytes could not be parsed (CSV, TOML/JSON, XML)."""


class ValidationError(FodmError):
    """Input parsed but violates a documented precondition."""


class DegenerateDataError(FodmError):
    """Data admits no meaningful clustering (e.g. zero variance)."""


class InvariantError(FodmError):
    """An internal invariant failed; indicates a bug, not bad input."""

    exit_code = 3
