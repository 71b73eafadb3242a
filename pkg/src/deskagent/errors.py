"""Exception family shared across the runtime."""

from __future__ import annotations


class DeskAgentError(Exception):
    """Base class for all runtime errors."""


class BoundsError(DeskAgentError):
    """A coordinate falls outside the resolution it is measured in."""

    def __init__(self, axis: str, value: int, limit: int):
        self.axis = axis
        self.value = value
        self.limit = limit
        super().__init__(f"{axis}={value} outside [0, {limit})")


class UnknownAction(DeskAgentError):
    """Action name is not one of the supported GUI primitives."""


class ActionArgumentError(DeskAgentError):
    """Action arguments do not match the action's arity or types."""


class UnknownKeySymbol(DeskAgentError):
    """A key-chord token is not in the key symbol table."""

    def __init__(self, token: str):
        self.token = token
        super().__init__(f"unknown key symbol: {token!r}")


class BackendError(DeskAgentError):
    """An input backend failed to inject an event or capture a frame."""


class BackendUnavailable(BackendError):
    """The requested backend cannot run on this host."""


class CaptureError(BackendError):
    """Frame capture failed or produced an unusable frame."""


class OrderError(DeskAgentError):
    """A screenshot arrived out of sequence order."""


class MissingPlaceholder(DeskAgentError):
    """Prompt template placeholders with no configured value."""

    def __init__(self, names: list[str]):
        self.names = list(names)
        super().__init__("unfilled placeholders: " + ", ".join(self.names))
