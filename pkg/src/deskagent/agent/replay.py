"""Deterministic re-execution of recorded traces on a fresh simulated desktop.

Verification replays each recorded step's invocations and compares, step by
step: result status and content, injected backend events, and screenshot
bytes against the stored PNG files. Final scene counters are checked against
the values recorded at capture time. Traces recorded on a live backend carry
no scene fixture and are not replayable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from deskagent.agent.trace import EpisodeTrace, load_trace
from deskagent.backends.simulated import SimulatedDesktop, parse_scene
from deskagent.clock import counter_clock
from deskagent.errors import DeskAgentError
from deskagent.screen import DisplayGeometry, parse_resolution
from deskagent.tools.computer import ComputerTool, ScreenshotStore
from deskagent.transcript.types import TextPart, ToolResult
from deskagent.transcript.validate import validate_invocation


class NotReplayable(DeskAgentError):
    """The trace lacks what replay needs (usually a scene fixture)."""


@dataclass
class StepReport:
    step: int
    ok: bool
    mismatches: list[str] = field(default_factory=list)


@dataclass
class ReplayReport:
    steps: list[StepReport] = field(default_factory=list)
    final_mismatches: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.steps) and not self.final_mismatches


def _describe_result(result: ToolResult) -> tuple:
    parts = tuple(
        ("text", p.text) if isinstance(p, TextPart) else ("image", p.ref)
        for p in result.content
    )
    return (result.call_id, result.status, parts, result.error_message)


def replay_trace(
    trace_dir: str | Path, verify: bool = True
) -> tuple[ReplayReport, SimulatedDesktop]:
    trace_dir = Path(trace_dir)
    trace = load_trace(trace_dir)
    return replay_loaded_trace(trace, trace_dir, verify=verify)


def replay_loaded_trace(
    trace: EpisodeTrace, trace_dir: Path | None = None, verify: bool = True
) -> tuple[ReplayReport, SimulatedDesktop]:
    scene_text = trace.config.get("scene_text")
    if not scene_text:
        raise NotReplayable(
            "trace carries no scene fixture (recorded on a live backend?); "
            "it cannot be replayed"
        )
    scene = parse_scene(scene_text)
    backend = SimulatedDesktop(scene)
    model_resolution = (
        parse_resolution(trace.config["model_resolution"])
        if trace.config.get("model_resolution")
        else scene.resolution
    )
    geometry = DisplayGeometry(model_resolution, scene.resolution)
    store = ScreenshotStore()
    tool = ComputerTool(backend, geometry, store=store, clock=counter_clock())

    report = ReplayReport()
    for record in trace.steps:
        mismatches: list[str] = []
        events_before = len(backend.event_log)
        shots_before = len(store.shots)
        results = []
        for invocation in record.decision.invocations:
            if invocation.tool_name != "computer":
                mismatches.append(
                    f"invocation {invocation.call_id} targets "
                    f"{invocation.tool_name!r}; replay only drives the simulated desktop"
                )
                continue
            violations = validate_invocation(tool.definition, invocation)
            if violations:
                results.append(
                    ToolResult.error(
                        invocation.call_id,
                        "invalid invocation: " + "; ".join(v.message for v in violations),
                    )
                )
            else:
                results.append(tool.execute(invocation))

        if verify:
            recorded = [_describe_result(r) for r in record.results]
            replayed = [_describe_result(r) for r in results]
            if recorded != replayed:
                mismatches.append(f"results differ: {replayed} != {recorded}")
            events = tuple(backend.event_log[events_before:])
            if events != record.events:
                mismatches.append(f"events differ: {events} != {record.events}")
            new_shots = store.shots[shots_before:]
            if tuple(s.ref for s in new_shots) != record.screenshots:
                mismatches.append(
                    f"screenshot refs differ: {[s.ref for s in new_shots]} != "
                    f"{list(record.screenshots)}"
                )
            elif trace_dir is not None:
                for shot in new_shots:
                    stored = trace_dir / f"{shot.ref}.png"
                    if stored.exists() and stored.read_bytes() != shot.png_bytes():
                        mismatches.append(f"{shot.ref} pixel bytes differ")
        report.steps.append(StepReport(record.step, not mismatches, mismatches))

    if verify and trace.config.get("final_counters") is not None:
        recorded_counters = {
            k: int(v) for k, v in trace.config["final_counters"].items()
        }
        if recorded_counters != backend.scene.counters:
            report.final_mismatches.append(
                f"final counters differ: {backend.scene.counters} != {recorded_counters}"
            )
    return report, backend
