from __future__ import annotations

import itertools

from deskagent.agent.adapters import (
    ActionDecision,
    AdapterTransportError,
    Instruction,
    ScriptedAdapter,
)
from deskagent.agent.episode import EpisodeLimits, ToolRegistry, run_episode
from deskagent.backends.simulated import SimulatedDesktop, parse_scene
from deskagent.clock import counter_clock
from deskagent.screen import DisplayGeometry
from deskagent.tools.computer import ComputerTool, ScreenshotStore
from deskagent.transcript.types import ToolInvocation

SCENE = """
resolution 640 480
cursor 100 150
widget id=go kind=button x=60 y=120 w=120 h=60 z=1 label="Go" effect=increment:clicks
counter clicks 0
"""

INSTR = Instruction("press the button")


def make_ids():
    counter = itertools.count()
    return lambda tool, args: ToolInvocation(f"call_{next(counter)}", tool, args)


def build_env(script, max_steps=10, history_cap=None, gate=None, should_abort=None):
    desk = SimulatedDesktop(parse_scene(SCENE))
    geom = DisplayGeometry.identity(desk.physical_resolution)
    store = ScreenshotStore()
    clock = counter_clock()
    tools = ToolRegistry({"computer": ComputerTool(desk, geom, store=store, clock=clock)})
    trace = run_episode(
        ScriptedAdapter(tuple(script)),
        tools,
        INSTR,
        EpisodeLimits(max_steps=max_steps, history_cap=history_cap),
        gate=gate,
        store=store,
        clock=clock,
        backend_event_log=desk.event_log,
        should_abort=should_abort,
    )
    return trace, desk


class TestTermination:
    def test_screenshot_click_empty_completes_in_three_steps(self):
        inv = make_ids()
        script = [
            ActionDecision("look", (inv("computer", {"action": "screenshot"}),)),
            ActionDecision("click", (inv("computer", {"action": "left_click"}),)),
            ActionDecision("done"),
        ]
        trace, desk = build_env(script)
        assert trace.final_status == "completed"
        assert len(trace.steps) == 3
        assert desk.event_log == ["left_click(go)"]
        assert desk.scene.counters["clicks"] == 1

    def test_immediately_empty_decision_is_one_completed_step(self):
        trace, _ = build_env([ActionDecision("nothing to do")])
        assert trace.final_status == "completed"
        assert len(trace.steps) == 1
        assert trace.steps[0].results == ()

    def test_step_limit_cuts_never_empty_script(self):
        inv = make_ids()
        script = [
            ActionDecision("again", (inv("computer", {"action": "screenshot"}),))
            for _ in range(10)
        ]
        trace, _ = build_env(script, max_steps=2)
        assert trace.final_status == "step_limit"
        assert len(trace.steps) == 2

    def test_needs_user_terminates_awaiting_user(self):
        inv = make_ids()
        script = [
            ActionDecision("login please", (inv("computer", {"action": "screenshot"}),), True),
            ActionDecision("never reached"),
        ]
        trace, _ = build_env(script)
        assert trace.final_status == "awaiting_user"
        assert len(trace.steps) == 1


class TestInvocationHandling:
    def test_every_invocation_gets_exactly_one_result_in_order(self):
        inv = make_ids()
        script = [
            ActionDecision(
                "chain",
                (
                    inv("computer", {"action": "mouse_move", "coordinate": [10, 10]}),
                    inv("computer", {"action": "left_click"}),
                    inv("computer", {"action": "screenshot"}),
                ),
            ),
            ActionDecision(""),
        ]
        trace, _ = build_env(script)
        step = trace.steps[0]
        assert [r.call_id for r in step.results] == [i.call_id for i in step.decision.invocations]

    def test_validation_violation_becomes_error_result_and_loop_continues(self):
        inv = make_ids()
        script = [
            ActionDecision("bad", (inv("computer", {"action": "mouse_move"}),)),
            ActionDecision("recover", (inv("computer", {"action": "screenshot"}),)),
            ActionDecision(""),
        ]
        trace, desk = build_env(script)
        assert trace.final_status == "completed"
        first = trace.steps[0].results[0]
        assert first.status == "error"
        assert "coordinate" in first.error_message
        assert desk.event_log == []  # invalid call never reached the backend
        assert trace.steps[1].results[0].status == "ok"

    def test_unknown_tool_is_an_error_result(self):
        inv = make_ids()
        script = [
            ActionDecision("hm", (inv("teleport", {"to": "mars"}),)),
            ActionDecision(""),
        ]
        trace, _ = build_env(script)
        result = trace.steps[0].results[0]
        assert result.status == "error"
        assert "unknown tool" in result.error_message

    def test_selective_observation_no_unprompted_screenshots(self):
        inv = make_ids()
        script = [
            ActionDecision("move", (inv("computer", {"action": "mouse_move", "coordinate": [5, 5]}),)),
            ActionDecision("click", (inv("computer", {"action": "left_click"}),)),
            ActionDecision(""),
        ]
        trace, _ = build_env(script)
        assert all(step.screenshots == () for step in trace.steps)

    def test_screenshots_flow_into_history_and_trace(self):
        inv = make_ids()
        script = [
            ActionDecision("a", (inv("computer", {"action": "screenshot"}),)),
            ActionDecision("b", (inv("computer", {"action": "screenshot"}),)),
            ActionDecision(""),
        ]
        trace, _ = build_env(script)
        assert trace.steps[0].screenshots == ("shot_0",)
        assert trace.steps[1].screenshots == ("shot_1",)


class GateSpy:
    def __init__(self, approve: bool, reason=None):
        self.approve = approve
        self.reason = reason
        self.seen: list[str] = []

    def review(self, invocation):
        self.seen.append(invocation.tool_name)
        return self.approve, self.reason


class TestGate:
    def test_deny_feeds_error_result_and_episode_continues(self):
        inv = make_ids()
        gate = GateSpy(False, "too risky")
        script = [
            ActionDecision("try", (inv("computer", {"action": "left_click"}),)),
            ActionDecision("still going", (inv("computer", {"action": "cursor_position"}),)),
            ActionDecision(""),
        ]
        trace, desk = build_env(script, gate=gate)
        assert trace.final_status == "completed"
        denied = trace.steps[0].results[0]
        assert denied.status == "error"
        assert "too risky" in denied.error_message
        assert desk.event_log == []
        assert gate.seen == ["computer", "computer"]

    def test_approve_lets_execution_proceed(self):
        inv = make_ids()
        gate = GateSpy(True)
        script = [
            ActionDecision("click", (inv("computer", {"action": "left_click"}),)),
            ActionDecision(""),
        ]
        trace, desk = build_env(script, gate=gate)
        assert trace.steps[0].results[0].status == "ok"
        assert desk.event_log == ["left_click(go)"]

    def test_invalid_invocations_never_reach_the_gate(self):
        inv = make_ids()
        gate = GateSpy(True)
        script = [
            ActionDecision("bad", (inv("computer", {"action": "mouse_move"}),)),
            ActionDecision(""),
        ]
        build_env(script, gate=gate)
        assert gate.seen == []


class TestAbortAndRetry:
    def test_abort_at_step_boundary(self):
        inv = make_ids()
        script = [
            ActionDecision("one", (inv("computer", {"action": "screenshot"}),)),
            ActionDecision("two", (inv("computer", {"action": "screenshot"}),)),
        ]
        calls = {"n": 0}

        def should_abort():
            calls["n"] += 1
            return calls["n"] > 1  # allow the first step, stop before the second

        trace, _ = build_env(script, should_abort=should_abort)
        assert trace.final_status == "aborted"
        assert len(trace.steps) == 1

    def test_transport_failure_retries_then_errors(self):
        class FlakyAdapter:
            def __init__(self):
                self.attempts = 0

            def decide(self, instruction, history, step_index):
                self.attempts += 1
                raise AdapterTransportError("down")

        desk = SimulatedDesktop(parse_scene(SCENE))
        geom = DisplayGeometry.identity(desk.physical_resolution)
        tools = ToolRegistry({"computer": ComputerTool(desk, geom, clock=counter_clock())})
        adapter = FlakyAdapter()
        naps: list[float] = []
        trace = run_episode(
            adapter, tools, INSTR, EpisodeLimits(max_steps=5),
            clock=counter_clock(), sleep=naps.append,
        )
        assert trace.final_status == "error"
        assert adapter.attempts == 3
        assert naps == [0.5, 1.0]
        assert "down" in trace.config["error"]

    def test_transient_failure_recovers(self):
        class Flaky:
            def __init__(self, inner):
                self.inner = inner
                self.failures = 1

            def decide(self, instruction, history, step_index):
                if self.failures:
                    self.failures -= 1
                    raise AdapterTransportError("blip")
                return self.inner.decide(instruction, history, step_index)

        desk = SimulatedDesktop(parse_scene(SCENE))
        geom = DisplayGeometry.identity(desk.physical_resolution)
        tools = ToolRegistry({"computer": ComputerTool(desk, geom, clock=counter_clock())})
        trace = run_episode(
            Flaky(ScriptedAdapter((ActionDecision("fine"),))),
            tools, INSTR, EpisodeLimits(max_steps=5),
            clock=counter_clock(), sleep=lambda s: None,
        )
        assert trace.final_status == "completed"


class TestDeterminism:
    def test_identical_runs_produce_identical_traces(self):
        def run_once():
            inv = make_ids()
            script = [
                ActionDecision("look", (inv("computer", {"action": "screenshot"}),)),
                ActionDecision("click", (inv("computer", {"action": "left_click"}),)),
                ActionDecision("done"),
            ]
            trace, _ = build_env(script)
            return trace

        a = run_once()
        b = run_once()
        assert a.steps == b.steps
        assert a.final_status == b.final_status
