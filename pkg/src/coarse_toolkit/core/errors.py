"""
Error types for the coarse toolkit.

Verification operations report failed mathematical checks through their report
objects; the exceptions below are reserved for inputs that cannot be processed
at all.
"""

from typing import Optional


class CoarseToolkitError(Exception):
    """Base class for all toolkit errors."""


class DomainError(CoarseToolkitError):
    """Raised for ill-formed spaces, unknown points or mismatched maps."""


class PreconditionError(CoarseToolkitError):
    """Raised when an operation's stated precondition does not hold."""


class SchemaError(CoarseToolkitError):
    """
    Raised when a JSON document does not match its schema.

    Attributes:
        pointer: JSON pointer (RFC 6901) of the first offending location.
    """

    def __init__(self, message: str, pointer: str = ""):
        self.pointer = pointer
        self.message = message
        super().__init__(f"{pointer or '/'}: {message}")


class ScenarioError(CoarseToolkitError):
    """Raised for unknown scenarios or unusable scenario parameters."""

    def __init__(self, message: str, scenario: Optional[str] = None):
        self.scenario = scenario
        super().__init__(message)
