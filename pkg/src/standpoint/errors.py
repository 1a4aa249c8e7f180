"""Exception hierarchy shared by the prover modules."""


class StandpointError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(StandpointError):
    """Malformed input text. Carries a 1-based line/column position."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ModelError(StandpointError):
    """A model does not declare a name used by a formula, or breaks its invariants."""


class OracleLimitError(StandpointError):
    """The brute-force oracle refused an input whose model space is too large."""


class ResourceExhausted(StandpointError):
    """A configured ceiling (threads or colorings) was hit before a verdict."""


class InvariantViolation(StandpointError):
    """An internal consistency check failed. Always indicates a bug."""


class ZipError(InvariantViolation):
    """Closed threads could not be fused into a single derivation."""
