from __future__ import annotations

import json
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from deskagent.service.config import ServiceConfig, load_config
from deskagent.service.http import create_app
from deskagent.service.manager import SessionManager, SessionNotFound, SessionStateError
from deskagent.service.policy import RiskPolicy, RiskRule
from deskagent.service.records import SessionRecord
from deskagent.transcript.types import ToolInvocation


def wait_until(predicate, timeout=15.0, interval=0.02):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        if predicate():
            return True
        time.sleep(interval)
    return False


@pytest.fixture
def config(tmp_path) -> ServiceConfig:
    return ServiceConfig(
        data_dir=str(tmp_path / "data"),
        jail_root=str(tmp_path / "jails"),
        bash_timeout_s=10.0,
    )


@pytest.fixture
def manager(config):
    m = SessionManager(config)
    yield m
    m.shutdown()


def create_demo(manager, session_id="demo1", **extra):
    options = {
        "session_id": session_id,
        "backend": {"type": "simulated", "scene": "demo_scene"},
        "adapter": {"type": "scripted", "script": "demo_script"},
    }
    options.update(extra)
    return manager.create_session("click the ok button", options)


def create_gated_bash(manager, session_id="bash1"):
    return manager.create_session(
        "check the working directory",
        {
            "session_id": session_id,
            "backend": {"type": "simulated", "scene": "demo_scene"},
            "adapter": {"type": "scripted", "script": "gated_bash_script"},
        },
    )


def terminal(manager, session_id):
    return lambda: manager.get_record(session_id).terminal


class TestLifecycle:
    def test_create_runs_to_completion(self, manager):
        record = create_demo(manager)
        assert record.status == "running"
        assert wait_until(terminal(manager, "demo1"))
        final = manager.get_record("demo1")
        assert final.status == "completed"

    def test_empty_instruction_rejected(self, manager):
        with pytest.raises(SessionStateError):
            manager.create_session("", {})

    def test_duplicate_session_id_conflicts(self, manager):
        create_demo(manager, "dup")
        wait_until(terminal(manager, "dup"))
        with pytest.raises(SessionStateError) as err:
            create_demo(manager, "dup")
        assert "already exists" in str(err.value)

    def test_unknown_session_raises_not_found(self, manager):
        with pytest.raises(SessionNotFound):
            manager.get_record("ghost")

    def test_bad_fixture_rejected_before_thread_start(self, manager):
        with pytest.raises(SessionStateError):
            create_demo(manager, "bad", backend={"type": "simulated", "scene": "missing.txt"})
        with pytest.raises(SessionNotFound):
            manager.get_record("bad")

    def test_list_filters(self, manager):
        create_demo(manager, "one")
        create_demo(manager, "two")
        assert wait_until(terminal(manager, "one"))
        assert wait_until(terminal(manager, "two"))
        manager.annotate("one", "Failed", error_category="AE", note="missed")
        failed = manager.list_records(outcome="Failed")
        assert [r.session_id for r in failed] == ["one"]
        completed = manager.list_records(status="completed")
        assert {r.session_id for r in completed} == {"one", "two"}


class TestApprovalWorkflow:
    def test_gated_bash_blocks_until_approved(self, manager):
        create_gated_bash(manager)
        assert wait_until(
            lambda: manager.get_record("bash1").status == "awaiting_approval"
        )
        # while pending, no result event for the gated call may exist
        time.sleep(0.3)
        kinds = [e["type"] for e in manager.events_snapshot("bash1")]
        assert "awaiting_approval" in kinds
        assert "result" not in kinds
        assert manager.get_record("bash1").status == "awaiting_approval"

        manager.resolve_approval("bash1", approve=True)
        assert wait_until(terminal(manager, "bash1"))
        events = manager.events_snapshot("bash1")
        results = [e for e in events if e["type"] == "result"]
        assert len(results) == 1
        assert results[0]["payload"]["status"] == "ok"
        assert "/" in results[0]["payload"]["text"]  # pwd output
        # audit: the result arrives only after the approval events
        order = [e["type"] for e in events]
        assert order.index("awaiting_approval") < order.index("result")
        assert manager.get_record("bash1").status == "completed"

    def test_denied_invocation_feeds_error_and_session_continues(self, manager):
        create_gated_bash(manager, "deny1")
        assert wait_until(
            lambda: manager.get_record("deny1").status == "awaiting_approval"
        )
        manager.resolve_approval("deny1", approve=False, reason="not today")
        assert wait_until(terminal(manager, "deny1"))
        record = manager.get_record("deny1")
        assert record.status == "completed"  # script goes on to its empty decision
        results = [e for e in manager.events_snapshot("deny1") if e["type"] == "result"]
        assert results[0]["payload"]["status"] == "error"
        assert "not today" in results[0]["payload"]["text"]

    def test_resolve_without_pending_is_an_error(self, manager):
        create_demo(manager, "plain")
        wait_until(terminal(manager, "plain"))
        with pytest.raises(SessionStateError):
            manager.resolve_approval("plain", approve=True)

    def test_custom_policy_can_allow_bash(self, config):
        policy = RiskPolicy(rules=(RiskRule(name="open", decision="allow", tool="bash"),))
        manager = SessionManager(config, policy=policy)
        try:
            create_gated_bash(manager, "free")
            assert wait_until(terminal(manager, "free"))
            assert manager.get_record("free").status == "completed"
            kinds = [e["type"] for e in manager.events_snapshot("free")]
            assert "awaiting_approval" not in kinds
        finally:
            manager.shutdown()

    def test_policy_first_match_wins_and_default_allows(self):
        policy = RiskPolicy(
            rules=(
                RiskRule(name="gate rm", decision="gate", tool="bash",
                         argument_equals=(("command", "rm -rf /"),)),
                RiskRule(name="allow rest", decision="allow", tool="bash"),
            )
        )
        gated = ToolInvocation("c", "bash", {"command": "rm -rf /"})
        fine = ToolInvocation("c", "bash", {"command": "ls"})
        other = ToolInvocation("c", "computer", {"action": "screenshot"})
        assert policy.decide(gated) == ("gate", "gate rm")
        assert policy.decide(fine) == ("allow", "allow rest")
        assert policy.decide(other) == ("allow", None)


class TestEventStream:
    def test_completed_session_replays_in_order(self, manager):
        create_demo(manager, "ev")
        assert wait_until(terminal(manager, "ev"))
        events = list(manager.events_since("ev", 0))
        assert [e["seq"] for e in events] == list(range(len(events)))
        kinds = [e["type"] for e in events]
        assert kinds[0] == "step_started"
        assert kinds[-1] == "status_change"
        assert "invocation" in kinds and "result" in kinds and "screenshot_ref" in kinds
        # event stream mirrors the persisted trace's step structure
        trace_lines = (
            Path(manager.config.data_dir) / "sessions" / "ev" / "trace.jsonl"
        ).read_text().splitlines()
        steps = [json.loads(line) for line in trace_lines]
        step_starts = [e for e in events if e["type"] == "step_started"]
        assert len(step_starts) == len(steps)
        result_events = [e["payload"]["call_id"] for e in events if e["type"] == "result"]
        trace_calls = [
            r["call_id"] for s in steps for r in s["results"]
        ]
        assert result_events == trace_calls

    def test_resume_from_sequence_number(self, manager):
        create_demo(manager, "resume")
        assert wait_until(terminal(manager, "resume"))
        all_events = list(manager.events_since("resume", 0))
        suffix = list(manager.events_since("resume", 3))
        assert suffix == all_events[3:]

    def test_unknown_session(self, manager):
        with pytest.raises(SessionNotFound):
            manager.events_since("nope", 0)


class TestAnnotation:
    def test_failed_with_category_persists(self, manager):
        create_demo(manager, "ann")
        assert wait_until(terminal(manager, "ann"))
        record = manager.annotate("ann", "Failed", error_category="AE",
                                  note="only selects part of the target")
        assert record.outcome == "Failed"
        assert record.error_category == "AE"
        manifest = json.loads(
            (Path(manager.config.data_dir) / "sessions" / "ann" / "manifest.json").read_text()
        )
        assert manifest["annotation"]["error_category"] == "AE"
        assert manifest["session"]["outcome"] == "Failed"

    def test_success_with_category_rejected(self, manager):
        create_demo(manager, "ann2")
        assert wait_until(terminal(manager, "ann2"))
        with pytest.raises(SessionStateError):
            manager.annotate("ann2", "Success", error_category="PE")
        assert manager.get_record("ann2").outcome is None

    def test_running_session_cannot_be_annotated(self, manager):
        create_gated_bash(manager, "ann3")  # parks at awaiting_approval
        assert wait_until(
            lambda: manager.get_record("ann3").status == "awaiting_approval"
        )
        with pytest.raises(SessionStateError):
            manager.annotate("ann3", "Success")
        manager.resolve_approval("ann3", approve=True)
        assert wait_until(terminal(manager, "ann3"))

    def test_bad_outcome_value_rejected(self, manager):
        create_demo(manager, "ann4")
        assert wait_until(terminal(manager, "ann4"))
        with pytest.raises(SessionStateError):
            manager.annotate("ann4", "Partial")


class TestAbort:
    def test_abort_waiting_session(self, manager):
        create_gated_bash(manager, "ab")
        assert wait_until(lambda: manager.get_record("ab").status == "awaiting_approval")
        manager.abort("ab")
        assert wait_until(terminal(manager, "ab"))
        assert manager.get_record("ab").status == "aborted"

    def test_abort_terminal_session_is_an_error(self, manager):
        create_demo(manager, "ab2")
        assert wait_until(terminal(manager, "ab2"))
        with pytest.raises(SessionStateError):
            manager.abort("ab2")


class TestRestartRecovery:
    def test_terminal_sessions_and_annotations_survive_restart(self, config):
        first = SessionManager(config)
        try:
            create_demo(first, "keep")
            assert wait_until(terminal(first, "keep"))
            first.annotate("keep", "Failed", error_category="CE", note="wrongly declared done")
            events_before = [e for e in first.events_snapshot("keep")]
        finally:
            first.shutdown()

        second = SessionManager(config)
        try:
            record = second.get_record("keep")
            assert record.status == "completed"
            assert record.outcome == "Failed"
            assert record.error_category == "CE"
            assert record.note == "wrongly declared done"
            replayed = list(second.events_since("keep", 0))
            assert replayed == events_before
        finally:
            second.shutdown()

    def test_interrupted_running_session_marked_error(self, config):
        store_dir = Path(config.data_dir) / "sessions" / "zombie"
        store_dir.mkdir(parents=True)
        record = SessionRecord(session_id="zombie", instruction="was running")
        (store_dir / "manifest.json").write_text(
            json.dumps({"session": record.to_dict()})
        )
        manager = SessionManager(config)
        try:
            loaded = manager.get_record("zombie")
            assert loaded.status == "error"
            assert "interrupted" in loaded.detail
        finally:
            manager.shutdown()


class TestHttpApi:
    @pytest.fixture
    def client(self, manager):
        return TestClient(create_app(manager))

    def test_empty_list(self, client):
        assert client.get("/sessions").json() == []

    def test_create_get_list_roundtrip(self, client, manager):
        response = client.post(
            "/sessions",
            json={
                "instruction": "demo over http",
                "session_id": "http1",
                "backend": {"type": "simulated", "scene": "demo_scene"},
                "adapter": {"type": "scripted", "script": "demo_script"},
            },
        )
        assert response.status_code == 201
        assert response.json()["status"] == "running"
        assert wait_until(terminal(manager, "http1"))
        record = client.get("/sessions/http1").json()
        assert record["status"] == "completed"
        listing = client.get("/sessions").json()
        assert [r["session_id"] for r in listing] == ["http1"]

    def test_create_validation_errors(self, client, manager):
        assert client.post("/sessions", json={"instruction": ""}).status_code == 400
        client.post(
            "/sessions",
            json={"instruction": "x", "session_id": "c1",
                  "adapter": {"type": "scripted", "script": "demo_script"}},
        )
        wait_until(terminal(manager, "c1"))
        duplicate = client.post(
            "/sessions", json={"instruction": "x", "session_id": "c1"}
        )
        assert duplicate.status_code == 409

    def test_not_found_routes(self, client):
        assert client.get("/sessions/ghost").status_code == 404
        assert client.post("/sessions/ghost/abort").status_code == 404
        assert client.get("/sessions/ghost/screenshots/0").status_code == 404

    def test_approval_and_annotation_over_http(self, client, manager):
        client.post(
            "/sessions",
            json={
                "instruction": "gated bash over http",
                "session_id": "h2",
                "adapter": {"type": "scripted", "script": "gated_bash_script"},
            },
        )
        assert wait_until(lambda: manager.get_record("h2").status == "awaiting_approval")
        bad = client.post("/sessions/h2/approval", json={"decision": "maybe"})
        assert bad.status_code == 400
        ok = client.post("/sessions/h2/approval", json={"decision": "approve"})
        assert ok.status_code == 200
        assert wait_until(terminal(manager, "h2"))
        rejected = client.post(
            "/sessions/h2/annotation",
            json={"outcome": "Success", "error_category": "AE"},
        )
        assert rejected.status_code == 409
        saved = client.post(
            "/sessions/h2/annotation",
            json={"outcome": "Failed", "error_category": "AE", "note": "x"},
        )
        assert saved.status_code == 200
        assert saved.json()["error_category"] == "AE"
        again = client.post("/sessions/h2/approval", json={"decision": "approve"})
        assert again.status_code == 409  # nothing pending anymore

    def test_event_stream_and_screenshot(self, client, manager):
        client.post(
            "/sessions",
            json={
                "instruction": "events over http",
                "session_id": "h3",
                "adapter": {"type": "scripted", "script": "demo_script"},
            },
        )
        assert wait_until(terminal(manager, "h3"))
        with client.stream("GET", "/sessions/h3/events") as response:
            assert response.status_code == 200
            assert response.headers["content-type"].startswith("text/event-stream")
            body = "".join(response.iter_text())
        assert "event: step_started" in body
        assert "event: status_change" in body
        assert "id: 0" in body
        # resume: only events after seq 2
        with client.stream("GET", "/sessions/h3/events?since=3") as response:
            tail = "".join(response.iter_text())
        assert "id: 0\n" not in tail
        assert "id: 3\n" in tail
        shot = client.get("/sessions/h3/screenshots/0")
        assert shot.status_code == 200
        assert shot.headers["content-type"] == "image/png"
        assert shot.content[:8] == b"\x89PNG\r\n\x1a\n"

    def test_abort_over_http(self, client, manager):
        client.post(
            "/sessions",
            json={
                "instruction": "to be aborted",
                "session_id": "h4",
                "adapter": {"type": "scripted", "script": "gated_bash_script"},
            },
        )
        assert wait_until(lambda: manager.get_record("h4").status == "awaiting_approval")
        response = client.post("/sessions/h4/abort")
        assert response.status_code == 200
        assert wait_until(lambda: manager.get_record("h4").status == "aborted")

    def test_bearer_token_enforced(self, config):
        config.token = "sekrit"
        manager = SessionManager(config)
        try:
            client = TestClient(create_app(manager))
            assert client.get("/sessions").status_code == 401
            ok = client.get("/sessions", headers={"authorization": "Bearer sekrit"})
            assert ok.status_code == 200
        finally:
            manager.shutdown()


class TestConfig:
    def test_precedence_env_over_file_over_defaults(self, tmp_path):
        config_file = tmp_path / "svc.json"
        config_file.write_text(json.dumps({"bind": "0.0.0.0:9000", "history_cap": 5}))
        config = load_config(config_file, env={"DESKAGENT_HISTORY_CAP": "7"})
        assert config.bind == "0.0.0.0:9000"  # file beats default
        assert config.history_cap == 7  # env beats file
        assert config.step_limit == 40  # default survives

    def test_unknown_file_keys_rejected(self, tmp_path):
        config_file = tmp_path / "svc.json"
        config_file.write_text(json.dumps({"bindd": "x"}))
        with pytest.raises(ValueError):
            load_config(config_file, env={})

    def test_bind_parsing(self):
        assert ServiceConfig(bind="0.0.0.0:9001").bind_host_port == ("0.0.0.0", 9001)
