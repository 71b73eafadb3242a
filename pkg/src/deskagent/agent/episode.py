"""The observe-decide-act loop.

Each step asks the adapter for a decision given the instruction and the
retained visual history, validates and executes the requested invocations in
source order, folds results and any new screenshots back into the history,
applies the history cap, and stops on an empty decision, a user-intervention
signal, or the step limit.

The runtime never injects screenshots on its own: observation happens only
when the model invokes the screenshot action.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Protocol

from deskagent.agent.adapters import (
    ActionDecision,
    AdapterTransportError,
    Instruction,
    ModelAdapter,
)
from deskagent.agent.history import HistoryContext, Turn, apply_history_cap, update_history
from deskagent.agent.trace import EpisodeTrace, StepRecord
from deskagent.clock import Clock, wall_clock
from deskagent.tools.computer import ScreenshotStore
from deskagent.transcript.types import (
    CallGroup,
    FreeText,
    ResultGroup,
    ToolInvocation,
    ToolResult,
    Violation,
)
from deskagent.transcript.validate import validate_invocation

RETRY_ATTEMPTS = 3
RETRY_BACKOFF_S = (0.5, 1.0)  # before attempts 2 and 3


class ToolExecutor(Protocol):
    @property
    def definition(self): ...

    def execute(self, invocation: ToolInvocation) -> ToolResult: ...


class ApprovalHook(Protocol):
    def review(self, invocation: ToolInvocation) -> tuple[bool, str | None]:
        """Block until a decision exists; (approved, deny_reason)."""


class ToolRegistry:
    def __init__(self, executors: dict[str, ToolExecutor]):
        self._executors = dict(executors)

    def get(self, name: str) -> ToolExecutor | None:
        return self._executors.get(name)

    def names(self) -> tuple[str, ...]:
        return tuple(self._executors)


@dataclass(frozen=True)
class EpisodeLimits:
    max_steps: int = 40
    history_cap: int | None = 10


def _violations_text(violations: list[Violation]) -> str:
    return "invalid invocation: " + "; ".join(v.message for v in violations)


def run_episode(
    adapter: ModelAdapter,
    tools: ToolRegistry,
    instruction: Instruction,
    limits: EpisodeLimits,
    gate: ApprovalHook | None = None,
    store: ScreenshotStore | None = None,
    episode_id: str = "episode",
    clock: Clock = wall_clock,
    on_event: Callable[[str, dict], None] | None = None,
    should_abort: Callable[[], bool] | None = None,
    backend_event_log: list[str] | None = None,
    sleep: Callable[[float], None] = time.sleep,
    config: dict | None = None,
) -> EpisodeTrace:
    store = store if store is not None else ScreenshotStore()
    emit = on_event or (lambda kind, payload: None)
    trace = EpisodeTrace(
        episode_id=episode_id,
        instruction=instruction,
        config=dict(config or {}),
    )
    history = HistoryContext(cap=limits.history_cap)
    final_status = "step_limit"

    for step_index in range(limits.max_steps):
        if should_abort and should_abort():
            final_status = "aborted"
            break
        emit("step_started", {"step": step_index})
        step_t0 = clock()

        decision = None
        for attempt in range(RETRY_ATTEMPTS):
            try:
                decision = adapter.decide(instruction, history, step_index)
                break
            except AdapterTransportError as exc:
                if attempt == RETRY_ATTEMPTS - 1:
                    trace.config["error"] = str(exc)
                    trace.final_status = "error"
                    emit("status_change", {"status": "error", "detail": str(exc)})
                    return trace
                sleep(RETRY_BACKOFF_S[attempt])
        assert decision is not None

        if decision.commentary:
            history = update_history(history, None, Turn("model", FreeText(decision.commentary)))
        if decision.invocations:
            history = update_history(
                history, None, Turn("model", CallGroup(decision.invocations))
            )

        results: list[ToolResult] = []
        new_shot_refs: list[str] = []
        events_before = len(backend_event_log) if backend_event_log is not None else 0
        shots_before = len(store.shots)

        for invocation in decision.invocations:
            emit(
                "invocation",
                {
                    "step": step_index,
                    "call_id": invocation.call_id,
                    "tool_name": invocation.tool_name,
                    "arguments": invocation.arguments,
                },
            )
            executor = tools.get(invocation.tool_name)
            if executor is None:
                result = ToolResult.error(
                    invocation.call_id, f"unknown tool {invocation.tool_name!r}"
                )
            else:
                violations = validate_invocation(executor.definition, invocation)
                if violations:
                    result = ToolResult.error(
                        invocation.call_id, _violations_text(violations)
                    )
                else:
                    approved, deny_reason = (True, None)
                    if gate is not None:
                        approved, deny_reason = gate.review(invocation)
                    if not approved:
                        result = ToolResult.error(
                            invocation.call_id,
                            f"invocation denied by operator: {deny_reason or 'no reason given'}",
                        )
                    else:
                        try:
                            result = executor.execute(invocation)
                        except Exception as exc:  # tool boundary of last resort
                            result = ToolResult.error(
                                invocation.call_id, f"{type(exc).__name__}: {exc}"
                            )
            results.append(result)
            emit(
                "result",
                {
                    "step": step_index,
                    "call_id": result.call_id,
                    "status": result.status,
                    "text": result.text,
                },
            )

        new_shots = store.shots[shots_before:]
        new_shot_refs = [s.ref for s in new_shots]
        for ref in new_shot_refs:
            emit("screenshot_ref", {"step": step_index, "ref": ref})

        if results:
            history = update_history(
                history,
                new_shots[0] if new_shots else None,
                Turn("tool", ResultGroup(tuple(results))),
            )
            for shot in new_shots[1:]:
                history = update_history(history, shot, None)
        history = apply_history_cap(history)

        step_events: tuple[str, ...] = ()
        if backend_event_log is not None:
            step_events = tuple(backend_event_log[events_before:])

        trace.steps.append(
            StepRecord(
                step=step_index,
                decision=decision,
                results=tuple(results),
                screenshots=tuple(new_shot_refs),
                events=step_events,
                t_wall_ms=clock() - step_t0,
            )
        )

        if decision.needs_user:
            final_status = "awaiting_user"
            break
        if not decision.invocations:
            final_status = "completed"
            break

    trace.final_status = final_status
    emit("status_change", {"status": final_status})
    return trace
