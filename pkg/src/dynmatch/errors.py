"""Exception types shared across the package."""

from __future__ import annotations


class GraphError(ValueError):
    """Rejected graph operation: bad endpoint, duplicate or missing edge."""


class StreamError(ValueError):
    """An update stream is malformed or not replayable."""


class ConfigError(ValueError):
    """Parameters are out of range or mutually inconsistent."""


class CapacityExceededError(RuntimeError):
    """The bounded-load orientation found no legal owner reassignment."""


class InvariantBreachError(RuntimeError):
    """Internal consistency was lost; the current state cannot be trusted."""
