"""Exception hierarchy shared by all hypercut modules."""

from typing import Optional


class HypercutError(Exception):
    """Root of all library-specific errors."""


class HypergraphFormatError(HypercutError, ValueError):
    """Malformed hMETIS-style input. ``line`` is 1-based."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        self.reason = message
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InfeasibleInputError(HypercutError, ValueError):
    """The input admits no value, e.g. an empty part under a normalized cut."""


class InstanceTooLargeError(HypercutError, ValueError):
    """The instance exceeds an enumeration or simulation cap."""


class GenerationError(HypercutError, RuntimeError):
    """A random instance with the requested properties could not be drawn."""
