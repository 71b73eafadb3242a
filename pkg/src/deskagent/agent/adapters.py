"""Model adapters: the decision function behind the agent loop.

ScriptedAdapter replays a fixed decision list keyed by step index and is pure,
which makes whole episodes reproducible. ApiAdapter talks JSON over HTTP to a
hosted model endpoint, mapping provider tool-call structures into invocations
and falling back to transcript parsing when the provider returns plain text.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import httpx

from deskagent.agent.history import HistoryContext
from deskagent.agent.prompt import compose_system_prompt
from deskagent.errors import DeskAgentError
from deskagent.transcript.codec import parse_transcript
from deskagent.transcript.types import CallGroup, ToolInvocation

DOMAIN_TAGS = ("web_search", "workflow", "office_productivity", "video_games", "other")


@dataclass(frozen=True)
class Instruction:
    text: str
    domain_tag: str | None = None

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("instruction text must be non-empty")
        if self.domain_tag is not None and self.domain_tag not in DOMAIN_TAGS:
            raise ValueError(f"unknown domain tag {self.domain_tag!r}")


@dataclass(frozen=True)
class ActionDecision:
    """One model turn: commentary plus the tool calls it wants to make.

    Zero invocations means the model considers the episode finished;
    needs_user means it is handing control back for required human input
    (authentication and similar stop points).
    """

    commentary: str = ""
    invocations: tuple[ToolInvocation, ...] = ()
    needs_user: bool = False


class AdapterTransportError(DeskAgentError):
    """Transport-level adapter failure; the episode loop retries these."""


class ModelAdapter(Protocol):
    def decide(
        self, instruction: Instruction, history: HistoryContext, step_index: int
    ) -> ActionDecision: ...


def _decision_from_payload(payload: dict, call_ids) -> ActionDecision:
    invocations = tuple(
        ToolInvocation(
            call_id=next(call_ids),
            tool_name=item["tool_name"],
            arguments=dict(item.get("arguments", {})),
        )
        for item in payload.get("invocations", ())
    )
    return ActionDecision(
        commentary=payload.get("commentary", ""),
        invocations=invocations,
        needs_user=bool(payload.get("needs_user", False)),
    )


@dataclass
class ScriptedAdapter:
    """Deterministic adapter: decision i answers step i; empty past the end."""

    decisions: tuple[ActionDecision, ...]

    def decide(
        self, instruction: Instruction, history: HistoryContext, step_index: int
    ) -> ActionDecision:
        if step_index < len(self.decisions):
            return self.decisions[step_index]
        return ActionDecision(commentary="(script exhausted)")

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "ScriptedAdapter":
        """Load decisions from a script file or a recorded trace.

        Both carry one JSON object per line; trace step records nest the
        decision under a "decision" key, so recorded traces replay as scripts.
        """
        ids = (f"call_{i}" for i in itertools.count())
        decisions = []
        for line in Path(path).read_text("utf-8").splitlines():
            line = line.strip()
            if not line:
                continue
            payload = json.loads(line)
            if "decision" in payload:
                payload = payload["decision"]
            decisions.append(_decision_from_payload(payload, ids))
        return cls(tuple(decisions))


def _image_block(shot) -> dict:
    import base64

    return {
        "type": "image",
        "source": {
            "type": "base64",
            "media_type": "image/png",
            "data": base64.b64encode(shot.png_bytes()).decode("ascii"),
        },
    }


@dataclass
class ApiAdapter:
    """HTTP client to a hosted model endpoint.

    Request body: {"system", "messages", "tools", "model"?}; expected reply:
    {"content": [{"type": "text", ...} | {"type": "tool_use", "id", "name",
    "input"}, ...]}. When the reply carries only text, any embedded call
    blocks are recovered with the transcript parser.
    """

    endpoint: str
    prompt_template: str
    prompt_config: dict[str, str]
    model: str | None = None
    api_key: str | None = None
    timeout_s: float = 60.0
    transport: httpx.BaseTransport | None = None
    _ids: itertools.count = field(default_factory=itertools.count, repr=False)

    def _messages(self, instruction: Instruction, history: HistoryContext) -> list[dict]:
        messages: list[dict] = [
            {"role": "user", "content": [{"type": "text", "text": instruction.text}]}
        ]
        for turn in history.turns:
            role = "assistant" if turn.role == "model" else "user"
            segment = turn.segment
            if isinstance(segment, CallGroup):
                blocks = [
                    {
                        "type": "tool_use",
                        "id": inv.call_id,
                        "name": inv.tool_name,
                        "input": inv.arguments,
                    }
                    for inv in segment.invocations
                ]
            elif hasattr(segment, "results"):
                blocks = []
                for result in segment.results:
                    parts = []
                    for part in result.content:
                        if hasattr(part, "text"):
                            parts.append({"type": "text", "text": part.text})
                        else:
                            shot = self._shot_by_ref(history, part.ref)
                            if shot is not None:
                                parts.append(_image_block(shot))
                    blocks.append(
                        {
                            "type": "tool_result",
                            "tool_use_id": result.call_id,
                            "is_error": result.status == "error",
                            "content": parts
                            or [{"type": "text", "text": result.error_message or ""}],
                        }
                    )
            else:
                blocks = [{"type": "text", "text": segment.text}]
            messages.append({"role": role, "content": blocks})
        return messages

    @staticmethod
    def _shot_by_ref(history: HistoryContext, ref: str):
        for shot in history.screenshots:
            if shot.ref == ref:
                return shot
        return None

    def decide(
        self, instruction: Instruction, history: HistoryContext, step_index: int
    ) -> ActionDecision:
        body = {
            "system": compose_system_prompt(self.prompt_template, self.prompt_config),
            "messages": self._messages(instruction, history),
            "tools": [
                {"name": name} for name in ("computer", "str_replace_editor", "bash")
            ],
        }
        if self.model:
            body["model"] = self.model
        headers = {"content-type": "application/json"}
        if self.api_key:
            headers["authorization"] = f"Bearer {self.api_key}"
        try:
            with httpx.Client(
                transport=self.transport, timeout=self.timeout_s
            ) as client:
                response = client.post(self.endpoint, json=body, headers=headers)
                response.raise_for_status()
                payload = response.json()
        except (httpx.HTTPError, ValueError) as exc:
            raise AdapterTransportError(f"model endpoint failure: {exc}") from exc
        return self._decision_from_response(payload)

    def _decision_from_response(self, payload: dict) -> ActionDecision:
        commentary_parts: list[str] = []
        invocations: list[ToolInvocation] = []
        for block in payload.get("content", ()):
            kind = block.get("type")
            if kind == "text":
                commentary_parts.append(block.get("text", ""))
            elif kind == "tool_use":
                invocations.append(
                    ToolInvocation(
                        call_id=block.get("id") or f"call_{next(self._ids)}",
                        tool_name=block.get("name", ""),
                        arguments=dict(block.get("input", {})),
                    )
                )
        commentary = "\n".join(p for p in commentary_parts if p)
        if not invocations and commentary:
            parsed = parse_transcript(commentary)
            recovered = [
                inv
                for seg in parsed.segments
                if isinstance(seg, CallGroup)
                for inv in seg.invocations
            ]
            invocations.extend(recovered)
        return ActionDecision(
            commentary=commentary,
            invocations=tuple(invocations),
            needs_user=bool(payload.get("needs_user", False)),
        )
