"""Parse and emit the tagged transcript format.

The call-block tag names are assembled from fragments instead of appearing
literally anywhere in this source tree: files from this repository can then be
embedded verbatim inside a model transcript without a runtime mistaking them
for live call blocks. The full grammar, with the verbatim template, lives in
GRAMMAR.md.
"""

from __future__ import annotations

import itertools
import json
import re
from typing import Any, Iterator

from deskagent.transcript.types import (
    CallGroup,
    FreeText,
    ImagePart,
    MalformedBlock,
    ParseResult,
    ResultGroup,
    TextPart,
    ToolInvocation,
    ToolResult,
    TranscriptSegment,
)

_NS = "ant" + "ml"
CALLS_TAG = _NS + ":function_calls"
INVOKE_TAG = _NS + ":invoke"
PARAM_TAG = _NS + ":parameter"
RESULTS_TAG = "function_results"

_CALLS_OPEN = "<" + CALLS_TAG + ">"
_CALLS_CLOSE = "</" + CALLS_TAG + ">"
_RESULTS_OPEN = "<" + RESULTS_TAG + ">"
_RESULTS_CLOSE = "</" + RESULTS_TAG + ">"
_INVOKE_CLOSE = "</" + INVOKE_TAG + ">"
_PARAM_CLOSE = "</" + PARAM_TAG + ">"

_INVOKE_OPEN_RE = re.compile("<" + re.escape(INVOKE_TAG) + r'\s+name="([^"]*)"\s*>')
_PARAM_OPEN_RE = re.compile("<" + re.escape(PARAM_TAG) + r'\s+name="([^"]*)"\s*>')
_RESULT_OPEN_RE = re.compile(r'<result\s+call_id="([^"]*)"\s+status="([^"]*)"\s*>')
_IMAGE_RE = re.compile(r'<image\s+ref="([^"]*)"\s*/>')
_WS_RE = re.compile(r"[ \t\r\n]*")


def escape_text(s: str) -> str:
    """Escape payload text so closing tags cannot be forged."""
    return s.replace("&", "&amp;").replace("<", "&lt;")


def escape_attr(s: str) -> str:
    return escape_text(s).replace('"', "&quot;")


def unescape_text(s: str) -> str:
    return s.replace("&lt;", "<").replace("&quot;", '"').replace("&amp;", "&")


class _Malformed(Exception):
    def __init__(self, reason: str, position: int):
        self.reason = reason
        self.position = position
        super().__init__(reason)


def _skip_ws(text: str, pos: int) -> int:
    m = _WS_RE.match(text, pos)
    return m.end() if m else pos


def _read_payload(text: str, pos: int, close_tag: str, what: str) -> tuple[str, int]:
    end = text.find(close_tag, pos)
    if end < 0:
        raise _Malformed(f"unterminated {what}", pos)
    return text[pos:end], end + len(close_tag)


def _interpret_value(raw: str) -> Any:
    """Strings pass through as-is; serialized lists/objects come back parsed."""
    value = unescape_text(raw)
    stripped = value.strip()
    if stripped.startswith("[") or stripped.startswith("{"):
        try:
            return json.loads(stripped)
        except ValueError:
            return value
    return value


def _parse_call_block(
    text: str, pos: int, call_ids: Iterator[str]
) -> tuple[CallGroup, int]:
    invocations: list[ToolInvocation] = []
    while True:
        pos = _skip_ws(text, pos)
        if text.startswith(_CALLS_CLOSE, pos):
            return CallGroup(tuple(invocations)), pos + len(_CALLS_CLOSE)
        m = _INVOKE_OPEN_RE.match(text, pos)
        if m is None:
            raise _Malformed("expected invoke element or block close", pos)
        tool_name = unescape_text(m.group(1))
        pos = m.end()
        arguments: dict[str, Any] = {}
        while True:
            pos = _skip_ws(text, pos)
            if text.startswith(_INVOKE_CLOSE, pos):
                pos += len(_INVOKE_CLOSE)
                break
            pm = _PARAM_OPEN_RE.match(text, pos)
            if pm is None:
                raise _Malformed("expected parameter element or invoke close", pos)
            raw, pos = _read_payload(text, pm.end(), _PARAM_CLOSE, "parameter")
            arguments[unescape_text(pm.group(1))] = _interpret_value(raw)
        invocations.append(ToolInvocation(next(call_ids), tool_name, arguments))


def _parse_result_block(text: str, pos: int) -> tuple[ResultGroup, int]:
    results: list[ToolResult] = []
    while True:
        pos = _skip_ws(text, pos)
        if text.startswith(_RESULTS_CLOSE, pos):
            return ResultGroup(tuple(results)), pos + len(_RESULTS_CLOSE)
        m = _RESULT_OPEN_RE.match(text, pos)
        if m is None:
            raise _Malformed("expected result element or block close", pos)
        call_id = unescape_text(m.group(1))
        status = unescape_text(m.group(2))
        pos = m.end()
        content: list[TextPart | ImagePart] = []
        error_message: str | None = None
        while True:
            pos = _skip_ws(text, pos)
            if text.startswith("</result>", pos):
                pos += len("</result>")
                break
            if text.startswith("<text>", pos):
                payload, pos = _read_payload(
                    text, pos + len("<text>"), "</text>", "text part"
                )
                content.append(TextPart(unescape_text(payload)))
                continue
            im = _IMAGE_RE.match(text, pos)
            if im is not None:
                content.append(ImagePart(unescape_text(im.group(1))))
                pos = im.end()
                continue
            if text.startswith("<error>", pos):
                payload, pos = _read_payload(
                    text, pos + len("<error>"), "</error>", "error part"
                )
                error_message = unescape_text(payload)
                continue
            raise _Malformed("unrecognized result content", pos)
        try:
            results.append(
                ToolResult(
                    call_id=call_id,
                    status=status,
                    content=tuple(content),
                    error_message=error_message,
                )
            )
        except ValueError as exc:
            raise _Malformed(f"invalid result element: {exc}", pos) from exc


def parse_transcript(text: str, call_ids: Iterator[str] | None = None) -> ParseResult:
    """Split raw model output into free text, call groups, and result groups.

    Never raises: structurally broken blocks come back as free text with a
    MalformedBlock diagnostic, and every input character lands in exactly one
    segment. Fresh call ids are drawn from ``call_ids`` (default: ``call_0``,
    ``call_1``, ... per call) since the block format carries none.
    """
    if call_ids is None:
        call_ids = (f"call_{i}" for i in itertools.count())
    segments: list[TranscriptSegment] = []
    diagnostics: list[MalformedBlock] = []
    free_start = 0
    pos = 0
    try:
        while True:
            call_at = text.find(_CALLS_OPEN, pos)
            result_at = text.find(_RESULTS_OPEN, pos)
            candidates = [p for p in (call_at, result_at) if p >= 0]
            if not candidates:
                break
            start = min(candidates)
            if start == call_at:
                open_tag, parser = _CALLS_OPEN, _parse_call_block
                args: tuple = (call_ids,)
            else:
                open_tag, parser = _RESULTS_OPEN, _parse_result_block
                args = ()
            try:
                segment, end = parser(text, start + len(open_tag), *args)
            except _Malformed as exc:
                diagnostics.append(MalformedBlock(exc.reason, start))
                pos = start + len(open_tag)
                continue
            if start > free_start:
                segments.append(FreeText(text[free_start:start]))
            segments.append(segment)
            free_start = pos = end
        if len(text) > free_start:
            segments.append(FreeText(text[free_start:]))
    except Exception as exc:  # totality net; not expected to trigger
        diagnostics.append(MalformedBlock(f"parser fault: {exc}", pos))
        segments = [FreeText(text)] if text else []
    return ParseResult(tuple(segments), tuple(diagnostics))


def _serialize_argument(value: Any) -> str:
    if isinstance(value, str):
        return escape_text(value)
    return escape_text(json.dumps(value))


def render_calls(invocations: list[ToolInvocation] | tuple[ToolInvocation, ...]) -> str:
    """Emit one call block; string arguments pass as-is, the rest as JSON."""
    lines = [_CALLS_OPEN]
    for inv in invocations:
        lines.append(f'<{INVOKE_TAG} name="{escape_attr(inv.tool_name)}">')
        for name, value in inv.arguments.items():
            lines.append(
                f'<{PARAM_TAG} name="{escape_attr(name)}">'
                f"{_serialize_argument(value)}</{PARAM_TAG}>"
            )
        lines.append(_INVOKE_CLOSE)
    lines.append(_CALLS_CLOSE)
    return "\n".join(lines)


def render_results(results: list[ToolResult] | tuple[ToolResult, ...]) -> str:
    """Emit one result block; parse(render(rs)) reproduces rs observably."""
    lines = [_RESULTS_OPEN]
    for res in results:
        lines.append(
            f'<result call_id="{escape_attr(res.call_id)}" status="{res.status}">'
        )
        for part in res.content:
            if isinstance(part, TextPart):
                lines.append(f"<text>{escape_text(part.text)}</text>")
            else:
                lines.append(f'<image ref="{escape_attr(part.ref)}"/>')
        if res.error_message is not None:
            lines.append(f"<error>{escape_text(res.error_message)}</error>")
        lines.append("</result>")
    lines.append(_RESULTS_CLOSE)
    return "\n".join(lines)
