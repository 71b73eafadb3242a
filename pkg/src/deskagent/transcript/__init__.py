"""Tagged function-call transcript protocol: parse, render, validate."""

from deskagent.transcript.types import (
    CallGroup,
    FreeText,
    ImagePart,
    MalformedBlock,
    ParseResult,
    PropertySpec,
    RequiredUnless,
    RequiresWhen,
    ResultGroup,
    TextPart,
    ToolDefinition,
    ToolInvocation,
    ToolResult,
    TranscriptSegment,
    Violation,
)
from deskagent.transcript.codec import (
    parse_transcript,
    render_calls,
    render_results,
)
from deskagent.transcript.validate import coerce_arguments, validate_invocation
from deskagent.transcript.builtin import (
    BASH_TOOL,
    COMPUTER_TOOL,
    EDITOR_TOOL,
    builtin_tools,
)

__all__ = [
    "BASH_TOOL",
    "COMPUTER_TOOL",
    "EDITOR_TOOL",
    "CallGroup",
    "FreeText",
    "ImagePart",
    "MalformedBlock",
    "ParseResult",
    "PropertySpec",
    "RequiredUnless",
    "RequiresWhen",
    "ResultGroup",
    "TextPart",
    "ToolDefinition",
    "ToolInvocation",
    "ToolResult",
    "TranscriptSegment",
    "Violation",
    "builtin_tools",
    "coerce_arguments",
    "parse_transcript",
    "render_calls",
    "render_results",
    "validate_invocation",
]
