"""Episode traces: an append-only record of each step, persisted as JSONL.

Layout (documented in TRACE_FORMAT.md): one directory per episode holding
``trace.jsonl`` (one object per step), ``manifest.json`` (instruction, config,
final status, annotations), and ``shot_<n>.png`` screenshot files. Replaying
needs only the JSONL plus the scene fixture recorded in the manifest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from deskagent.agent.adapters import ActionDecision, Instruction
from deskagent.transcript.types import ImagePart, TextPart, ToolInvocation, ToolResult

TRACE_FILE = "trace.jsonl"
MANIFEST_FILE = "manifest.json"

FINAL_STATUSES = ("completed", "step_limit", "error", "aborted", "awaiting_user")


@dataclass(frozen=True)
class StepRecord:
    step: int
    decision: ActionDecision
    results: tuple[ToolResult, ...] = ()
    screenshots: tuple[str, ...] = ()
    events: tuple[str, ...] = ()
    t_wall_ms: int = 0


@dataclass
class EpisodeTrace:
    episode_id: str
    instruction: Instruction
    steps: list[StepRecord] = field(default_factory=list)
    final_status: str = "error"
    config: dict = field(default_factory=dict)


def _decision_to_dict(decision: ActionDecision) -> dict:
    return {
        "commentary": decision.commentary,
        "invocations": [
            {
                "call_id": inv.call_id,
                "tool_name": inv.tool_name,
                "arguments": inv.arguments,
            }
            for inv in decision.invocations
        ],
        "needs_user": decision.needs_user,
    }


def _decision_from_dict(payload: dict) -> ActionDecision:
    return ActionDecision(
        commentary=payload.get("commentary", ""),
        invocations=tuple(
            ToolInvocation(
                call_id=item.get("call_id", f"call_{i}"),
                tool_name=item["tool_name"],
                arguments=dict(item.get("arguments", {})),
            )
            for i, item in enumerate(payload.get("invocations", ()))
        ),
        needs_user=bool(payload.get("needs_user", False)),
    )


def _result_to_dict(result: ToolResult) -> dict:
    parts = []
    for part in result.content:
        if isinstance(part, TextPart):
            parts.append({"type": "text", "text": part.text})
        else:
            parts.append({"type": "image", "ref": part.ref})
    return {
        "call_id": result.call_id,
        "status": result.status,
        "parts": parts,
        "error_message": result.error_message,
    }


def _result_from_dict(payload: dict) -> ToolResult:
    parts = []
    for item in payload.get("parts", ()):
        if item["type"] == "text":
            parts.append(TextPart(item["text"]))
        else:
            parts.append(ImagePart(item["ref"]))
    return ToolResult(
        call_id=payload["call_id"],
        status=payload["status"],
        content=tuple(parts),
        error_message=payload.get("error_message"),
    )


def step_to_dict(record: StepRecord) -> dict:
    return {
        "step": record.step,
        "decision": _decision_to_dict(record.decision),
        "results": [_result_to_dict(r) for r in record.results],
        "screenshots": list(record.screenshots),
        "events": list(record.events),
        "t_wall_ms": record.t_wall_ms,
    }


def step_from_dict(payload: dict) -> StepRecord:
    return StepRecord(
        step=payload["step"],
        decision=_decision_from_dict(payload["decision"]),
        results=tuple(_result_from_dict(r) for r in payload.get("results", ())),
        screenshots=tuple(payload.get("screenshots", ())),
        events=tuple(payload.get("events", ())),
        t_wall_ms=payload.get("t_wall_ms", 0),
    )


def dumps_line(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def save_trace(trace: EpisodeTrace, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = [dumps_line(step_to_dict(s)) for s in trace.steps]
    (directory / TRACE_FILE).write_text(
        "".join(line + "\n" for line in lines), encoding="utf-8"
    )
    manifest = {
        "episode_id": trace.episode_id,
        "instruction": {
            "text": trace.instruction.text,
            "domain_tag": trace.instruction.domain_tag,
        },
        "final_status": trace.final_status,
        "config": trace.config,
    }
    (directory / MANIFEST_FILE).write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return directory


def load_trace(directory: str | Path) -> EpisodeTrace:
    directory = Path(directory)
    manifest = json.loads((directory / MANIFEST_FILE).read_text("utf-8"))
    steps = []
    trace_path = directory / TRACE_FILE
    if trace_path.exists():
        for line in trace_path.read_text("utf-8").splitlines():
            if line.strip():
                steps.append(step_from_dict(json.loads(line)))
    instruction = Instruction(
        text=manifest["instruction"]["text"],
        domain_tag=manifest["instruction"].get("domain_tag"),
    )
    return EpisodeTrace(
        episode_id=manifest["episode_id"],
        instruction=instruction,
        steps=steps,
        final_status=manifest["final_status"],
        config=manifest.get("config", {}),
    )
