"""Data model for tool contracts, invocations, results, and transcript segments."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Union

PROPERTY_KINDS = ("string", "integer", "boolean", "array-of-integer", "array")


@dataclass(frozen=True)
class PropertySpec:
    """One named parameter of a tool, with its wire kind and documentation."""

    name: str
    kind: str
    description: str = ""
    enum_values: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in PROPERTY_KINDS:
            raise ValueError(f"unknown property kind: {self.kind!r}")
        if self.enum_values is not None:
            if not self.enum_values:
                raise ValueError(f"property {self.name}: empty enum")
            if len(set(self.enum_values)) != len(self.enum_values):
                raise ValueError(f"property {self.name}: duplicate enum values")


@dataclass(frozen=True)
class Violation:
    """One schema or rule violation found while validating an invocation."""

    code: str  # missing_required | unknown_property | kind_mismatch | enum | rule | wrong_tool
    property: str | None
    message: str

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.message


@dataclass(frozen=True)
class RequiresWhen:
    """Conditional requirement keyed on one property's value.

    When ``trigger`` holds one of ``trigger_values``, every property in
    ``requires`` must be present and every property in ``forbids`` absent.
    """

    name: str
    trigger: str
    trigger_values: tuple[str, ...]
    requires: tuple[str, ...] = ()
    forbids: tuple[str, ...] = ()

    def check(self, arguments: dict[str, Any]) -> list[Violation]:
        value = arguments.get(self.trigger)
        if not isinstance(value, str) or value not in self.trigger_values:
            return []
        out = []
        for prop in self.requires:
            if prop not in arguments:
                out.append(
                    Violation(
                        "rule",
                        prop,
                        f"{self.name}: {prop!r} is required when "
                        f"{self.trigger}={value!r}",
                    )
                )
        for prop in self.forbids:
            if prop in arguments:
                out.append(
                    Violation(
                        "rule",
                        prop,
                        f"{self.name}: {prop!r} is not accepted when "
                        f"{self.trigger}={value!r}",
                    )
                )
        return out


def _truthy(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        return value.strip().lower() == "true"
    return False


@dataclass(frozen=True)
class RequiredUnless:
    """``required`` must be present unless ``unless`` is set to true."""

    name: str
    required: str
    unless: str

    def check(self, arguments: dict[str, Any]) -> list[Violation]:
        if _truthy(arguments.get(self.unless)):
            return []
        if self.required in arguments:
            return []
        return [
            Violation(
                "rule",
                self.required,
                f"{self.name}: {self.required!r} is required unless "
                f"{self.unless!r} is true",
            )
        ]


Rule = Union[RequiresWhen, RequiredUnless]


@dataclass(frozen=True)
class ToolDefinition:
    """A callable tool contract: flat property schema plus conditional rules."""

    name: str
    properties: tuple[PropertySpec, ...]
    required: tuple[str, ...] = ()
    rules: tuple[Rule, ...] = ()
    description: str = ""

    def __post_init__(self) -> None:
        names = [p.name for p in self.properties]
        if len(set(names)) != len(names):
            raise ValueError(f"tool {self.name}: duplicate property names")
        for req in self.required:
            if req not in names:
                raise ValueError(f"tool {self.name}: required {req!r} not a property")

    def property_named(self, name: str) -> PropertySpec | None:
        for prop in self.properties:
            if prop.name == name:
                return prop
        return None


@dataclass(frozen=True)
class ToolInvocation:
    """One parsed model-requested tool call."""

    call_id: str
    tool_name: str
    arguments: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class TextPart:
    text: str


@dataclass(frozen=True)
class ImagePart:
    """Reference to a stored screenshot; pixel bytes travel out of band."""

    ref: str


ContentPart = Union[TextPart, ImagePart]


@dataclass(frozen=True)
class ToolResult:
    """Outcome of one invocation: ordered content parts plus error state."""

    call_id: str
    status: str = "ok"  # ok | error
    content: tuple[ContentPart, ...] = ()
    error_message: str | None = None

    def __post_init__(self) -> None:
        if self.status not in ("ok", "error"):
            raise ValueError(f"bad status: {self.status!r}")
        if self.status == "error" and not self.error_message:
            raise ValueError("error result requires error_message")

    @property
    def text(self) -> str:
        """All text parts joined; error message included for error results."""
        parts = [p.text for p in self.content if isinstance(p, TextPart)]
        if self.status == "error" and self.error_message:
            parts.append(self.error_message)
        return "\n".join(parts)

    @classmethod
    def ok(cls, call_id: str, text: str = "", images: tuple[str, ...] = ()) -> "ToolResult":
        content: tuple[ContentPart, ...] = ()
        if text:
            content += (TextPart(text),)
        content += tuple(ImagePart(ref) for ref in images)
        return cls(call_id=call_id, status="ok", content=content)

    @classmethod
    def error(cls, call_id: str, message: str) -> "ToolResult":
        return cls(call_id=call_id, status="error", error_message=message)


@dataclass(frozen=True)
class FreeText:
    text: str


@dataclass(frozen=True)
class CallGroup:
    """One call block; invocations keep their source order."""

    invocations: tuple[ToolInvocation, ...]


@dataclass(frozen=True)
class ResultGroup:
    results: tuple[ToolResult, ...]


TranscriptSegment = Union[FreeText, CallGroup, ResultGroup]


@dataclass(frozen=True)
class MalformedBlock:
    """Diagnostic for a structurally broken block returned as free text."""

    reason: str
    position: int


@dataclass(frozen=True)
class ParseResult:
    """Segments in source order plus diagnostics for malformed blocks."""

    segments: tuple[TranscriptSegment, ...]
    diagnostics: tuple[MalformedBlock, ...] = ()
