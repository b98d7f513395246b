"""Exception types raised across the pipeline."""


class EthPhishError(Exception):
    """Base class for all package errors."""


class ParseError(EthPhishError, ValueError):
    """A malformed row in an input file."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ConfigError(EthPhishError, ValueError):
    """Bad configuration: missing columns, invalid keys or values."""


class GraphError(EthPhishError, ValueError):
    """A graph query whose preconditions do not hold."""


class ModelError(EthPhishError, RuntimeError):
    """Misuse of the model, e.g. backward without a cached forward pass."""


class FormatError(EthPhishError, ValueError):
    """A container file that cannot be decoded."""
