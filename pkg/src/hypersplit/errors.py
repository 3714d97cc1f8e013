"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: InvariantViolation -> 1,
ConfigError -> 2, ResourceCapError -> 3.
"""


class HypersplitError(Exception):
    """Base class for all package errors."""


class ConfigError(HypersplitError):
    """Invalid or inconsistent user-supplied parameters."""


class InvariantViolation(HypersplitError):
    """A structural guarantee of the pipeline was broken (always a bug)."""


class ResourceCapError(HypersplitError):
    """An operation would exceed a configured memory or size cap."""

    def __init__(self, message: str, estimate: int | None = None):
        super().__init__(message)
        self.estimate = estimate
