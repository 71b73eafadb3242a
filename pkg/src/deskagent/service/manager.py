"""Session manager: spawns episode threads, multiplexes events, persists state.

Each session runs its episode loop on one thread; the manager linearizes
record transitions and approval resolutions per session. Event streams are
read-only and multi-consumer, resumable from any sequence number; a stream
ends once the session is terminal and fully delivered.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator

from deskagent.agent.adapters import ApiAdapter, Instruction, ScriptedAdapter
from deskagent.agent.episode import EpisodeLimits, ToolRegistry, run_episode
from deskagent.agent.prompt import default_template, format_datetime
from deskagent.agent.trace import EpisodeTrace
from deskagent.backends.live import LiveDesktop
from deskagent.backends.simulated import SimulatedDesktop, parse_scene
from deskagent.clock import counter_clock, wall_clock
from deskagent.errors import BackendUnavailable
from deskagent.fixtures import resolve_fixture_text
from deskagent.screen import DisplayGeometry, format_resolution, parse_resolution
from deskagent.service.config import ServiceConfig
from deskagent.service.gate import ApprovalGate, NoPendingApproval, PendingApproval
from deskagent.service.policy import RiskPolicy
from deskagent.service.records import (
    AnnotationError,
    SessionRecord,
    episode_status_to_session,
)
from deskagent.service.store import SessionStore
from deskagent.tools.computer import ComputerTool, ScreenshotStore
from deskagent.tools.editor import EditorTool
from deskagent.tools.shell import BashTool
from datetime import datetime


class SessionNotFound(KeyError):
    pass


class SessionStateError(ValueError):
    """Request conflicts with the session's current state or config."""


class EventLog:
    """Ordered, numbered, persisted event list with blocking readers."""

    def __init__(self, persist=None):
        self._persist = persist or (lambda event: None)
        self._cond = threading.Condition()
        self._events: list[dict] = []
        self._closed = False

    def preload(self, events: list[dict], closed: bool = True) -> None:
        with self._cond:
            self._events = list(events)
            self._closed = closed
            self._cond.notify_all()

    def append(self, kind: str, payload: dict) -> dict:
        with self._cond:
            event = {"seq": len(self._events), "type": kind, "payload": payload}
            self._events.append(event)
            self._cond.notify_all()
        self._persist(event)
        return event

    def close(self) -> None:
        with self._cond:
            self._closed = True
            self._cond.notify_all()

    def snapshot(self) -> list[dict]:
        with self._cond:
            return list(self._events)

    def iter_since(self, since: int = 0, poll_s: float = 0.25) -> Iterator[dict]:
        """Yield events with seq >= since; return once closed and drained."""
        cursor = since
        while True:
            with self._cond:
                while cursor >= len(self._events) and not self._closed:
                    self._cond.wait(timeout=poll_s)
                if cursor >= len(self._events) and self._closed:
                    return
                batch = self._events[cursor:]
                cursor = len(self._events)
            yield from batch


@dataclass
class _Session:
    record: SessionRecord
    events: EventLog
    gate: ApprovalGate | None = None
    abort_event: threading.Event = field(default_factory=threading.Event)
    thread: threading.Thread | None = None
    bash: BashTool | None = None
    directory: Path | None = None


class SessionManager:
    def __init__(self, config: ServiceConfig, policy: RiskPolicy | None = None):
        self.config = config
        if policy is not None:
            self.policy = policy
        elif config.risk_policy_file:
            self.policy = RiskPolicy.from_file(config.risk_policy_file)
        else:
            self.policy = RiskPolicy.default()
        self.store = SessionStore(config.data_dir)
        self._lock = threading.Lock()
        self._sessions: dict[str, _Session] = {}
        self._load_persisted()

    # -- startup -----------------------------------------------------------

    def _load_persisted(self) -> None:
        for session_id, manifest in self.store.scan():
            payload = manifest.get("session")
            if not payload:
                continue
            record = SessionRecord.from_dict(payload)
            if not record.terminal:
                # the episode thread died with the previous process
                record = replace(record, status="error", detail="interrupted by service restart")
                self.store.save_record(record)
            events = EventLog()
            events.preload(self.store.load_events(session_id), closed=True)
            self._sessions[session_id] = _Session(
                record=record, events=events, directory=self.store.session_dir(session_id)
            )

    # -- record bookkeeping --------------------------------------------------

    def _get(self, session_id: str) -> _Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise SessionNotFound(session_id)
        return session

    def _set_record(self, session: _Session, record: SessionRecord) -> SessionRecord:
        with self._lock:
            session.record = record
        self.store.save_record(record)
        return record

    def _transition(self, session: _Session, status: str, detail: str | None = None) -> None:
        with self._lock:
            if session.record.status == status:
                return
            record = session.record.with_status(status, detail)
            session.record = record
        self.store.save_record(record)

    # -- creation ------------------------------------------------------------

    def create_session(self, instruction: str, options: dict | None = None) -> SessionRecord:
        options = dict(options or {})
        try:
            instr = Instruction(text=instruction, domain_tag=options.get("domain_tag"))
        except ValueError as exc:
            raise SessionStateError(str(exc)) from exc
        session_id = options.get("session_id") or uuid.uuid4().hex[:12]
        with self._lock:
            if session_id in self._sessions:
                raise SessionStateError(f"session id {session_id!r} already exists")
            placeholder = _Session(
                record=SessionRecord(session_id=session_id, instruction=instruction),
                events=EventLog(),
            )
            self._sessions[session_id] = placeholder
        try:
            return self._start_session(placeholder, instr, options)
        except Exception:
            with self._lock:
                self._sessions.pop(session_id, None)
            raise

    def _start_session(
        self, session: _Session, instr: Instruction, options: dict
    ) -> SessionRecord:
        session_id = session.record.session_id
        directory = self.store.create_session_dir(session_id)
        session.directory = directory

        backend_options = options.get("backend") or {"type": "simulated"}
        if isinstance(backend_options, str):
            backend_options = {"type": backend_options}
        backend_type = backend_options.get("type", "simulated")

        scripted = None
        adapter_options = options.get("adapter") or {}
        if isinstance(adapter_options, str):
            kind, _, ref = adapter_options.partition(":")
            adapter_options = {"type": kind, ("script" if kind == "scripted" else "endpoint"): ref}

        scene_text: str | None = None
        event_log_ref: list[str] | None = None
        if backend_type == "simulated":
            scene_ref = backend_options.get("scene") or "demo_scene"
            if backend_options.get("scene_text"):
                scene_text = backend_options["scene_text"]
            else:
                try:
                    scene_text = resolve_fixture_text(scene_ref)
                except FileNotFoundError as exc:
                    raise SessionStateError(str(exc)) from exc
            try:
                scene = parse_scene(scene_text)
            except ValueError as exc:
                raise SessionStateError(f"bad scene fixture: {exc}") from exc
            backend = SimulatedDesktop(scene)
            event_log_ref = backend.event_log
            model_resolution = (
                parse_resolution(options["resolution"])
                if options.get("resolution")
                else scene.resolution
            )
            geometry = DisplayGeometry(model_resolution, scene.resolution)
        elif backend_type == "live":
            try:
                backend = LiveDesktop()
            except BackendUnavailable as exc:
                raise SessionStateError(str(exc)) from exc
            model_resolution = parse_resolution(
                options.get("resolution") or self.config.resolution
            )
            geometry = DisplayGeometry(model_resolution, backend.physical_resolution)
        else:
            raise SessionStateError(f"unknown backend type {backend_type!r}")

        adapter_type = adapter_options.get("type", "scripted")
        if adapter_type == "scripted":
            script_ref = adapter_options.get("script") or "demo_script"
            if adapter_options.get("script_text"):
                script_text = adapter_options["script_text"]
            else:
                try:
                    script_text = resolve_fixture_text(script_ref)
                except FileNotFoundError as exc:
                    raise SessionStateError(str(exc)) from exc
            script_path = directory / "script.jsonl"
            script_path.write_text(script_text, encoding="utf-8")
            try:
                scripted = ScriptedAdapter.from_jsonl(script_path)
            except (ValueError, KeyError) as exc:
                raise SessionStateError(f"bad script: {exc}") from exc
            adapter = scripted
        elif adapter_type == "api":
            endpoint = adapter_options.get("endpoint")
            if not endpoint:
                raise SessionStateError("api adapter needs an endpoint")
            adapter = ApiAdapter(
                endpoint=endpoint,
                prompt_template=default_template(),
                prompt_config={
                    "screen_resolution": format_resolution(geometry.model_resolution),
                    "datetime": format_datetime(datetime.now()),
                },
                model=adapter_options.get("model"),
                api_key=adapter_options.get("api_key"),
            )
        else:
            raise SessionStateError(f"unknown adapter type {adapter_type!r}")

        deterministic = backend_type == "simulated" and scripted is not None
        clock = counter_clock() if deterministic else wall_clock

        shot_store = ScreenshotStore(directory=directory)
        jail_root = Path(self.config.jail_root or (Path(self.config.data_dir) / "jails"))
        jail = jail_root / session_id
        jail.mkdir(parents=True, exist_ok=True)
        bash_tool = BashTool(timeout_s=self.config.bash_timeout_s)
        session.bash = bash_tool
        tools = ToolRegistry(
            {
                "computer": ComputerTool(backend, geometry, store=shot_store, clock=clock),
                "str_replace_editor": EditorTool(root_jail=jail),
                "bash": bash_tool,
            }
        )

        def on_pending(pending: PendingApproval) -> None:
            self._transition(session, "awaiting_approval")
            session.events.append(
                "awaiting_approval",
                {
                    "call_id": pending.invocation.call_id,
                    "tool_name": pending.invocation.tool_name,
                    "arguments": pending.invocation.arguments,
                    "risk_reason": pending.risk_reason,
                },
            )
            session.events.append("status_change", {"status": "awaiting_approval"})

        def on_resolved(pending: PendingApproval, approved: bool, reason) -> None:
            self._transition(session, "running")
            session.events.append("status_change", {"status": "running"})

        session.gate = ApprovalGate(self.policy, on_pending=on_pending, on_resolved=on_resolved)
        session.events = EventLog(
            persist=lambda event: self.store.append_event(session_id, event)
        )

        limits = EpisodeLimits(
            max_steps=int(options.get("max_steps", self.config.step_limit)),
            history_cap=int(options.get("history_cap", self.config.history_cap)),
        )
        episode_config = {
            "backend": backend_type,
            "adapter": adapter_type,
            "model_resolution": format_resolution(geometry.model_resolution),
            "physical_resolution": format_resolution(geometry.physical_resolution),
            "max_steps": limits.max_steps,
            "history_cap": limits.history_cap,
            "deterministic": deterministic,
        }
        if scene_text is not None:
            episode_config["scene_text"] = scene_text

        def emit(kind: str, payload: dict) -> None:
            if kind == "status_change":
                return  # the runner's terminal status is translated in _run
            session.events.append(kind, payload)

        def _run() -> None:
            try:
                trace = run_episode(
                    adapter,
                    tools,
                    instr,
                    limits,
                    gate=session.gate,
                    store=shot_store,
                    episode_id=session_id,
                    clock=clock,
                    on_event=emit,
                    should_abort=session.abort_event.is_set,
                    backend_event_log=event_log_ref,
                    config=episode_config,
                )
            except Exception as exc:  # defensive: a crashed loop still terminates the session
                trace = EpisodeTrace(
                    episode_id=session_id,
                    instruction=instr,
                    final_status="error",
                    config={**episode_config, "error": f"{type(exc).__name__}: {exc}"},
                )
            finally:
                bash_tool.close()
            self.store.save_trace(session_id, trace)
            status, detail = episode_status_to_session(trace.final_status)
            with self._lock:
                record = replace(session.record, status=status, detail=detail)
                session.record = record
            self.store.save_record(record)
            session.events.append(
                "status_change",
                {"status": status, "final_status": trace.final_status, "detail": detail},
            )
            session.events.close()

        record = SessionRecord(
            session_id=session_id,
            instruction=instr.text,
            domain_tag=instr.domain_tag,
            status="running",
        )
        self._set_record(session, record)
        session.thread = threading.Thread(target=_run, name=f"session-{session_id}", daemon=True)
        session.thread.start()
        return record

    # -- queries -------------------------------------------------------------

    def get_record(self, session_id: str) -> SessionRecord:
        return self._get(session_id).record

    def list_records(
        self, status: str | None = None, outcome: str | None = None
    ) -> list[SessionRecord]:
        with self._lock:
            records = [s.record for s in self._sessions.values()]
        records.sort(key=lambda r: (r.created_at, r.session_id))
        if status is not None:
            records = [r for r in records if r.status == status]
        if outcome is not None:
            records = [r for r in records if r.outcome == outcome]
        return records

    def events_since(self, session_id: str, since: int = 0) -> Iterator[dict]:
        return self._get(session_id).events.iter_since(since)

    def events_snapshot(self, session_id: str) -> list[dict]:
        return self._get(session_id).events.snapshot()

    def screenshot_path(self, session_id: str, index: int) -> Path:
        self._get(session_id)
        path = self.store.screenshot_path(session_id, index)
        if not path.exists():
            raise SessionNotFound(f"screenshot {index} of session {session_id}")
        return path

    # -- operator actions ------------------------------------------------------

    def resolve_approval(
        self, session_id: str, approve: bool, reason: str | None = None
    ) -> SessionRecord:
        session = self._get(session_id)
        if session.gate is None:
            raise SessionStateError("session has no approval gate (not live)")
        try:
            session.gate.resolve(approve, reason)
        except NoPendingApproval as exc:
            raise SessionStateError(str(exc)) from exc
        return session.record

    def annotate(
        self,
        session_id: str,
        outcome: str,
        error_category: str | None = None,
        note: str | None = None,
    ) -> SessionRecord:
        session = self._get(session_id)
        with self._lock:
            try:
                record = session.record.with_annotation(outcome, error_category, note)
            except (AnnotationError, ValueError) as exc:
                raise SessionStateError(str(exc)) from exc
            session.record = record
        self.store.save_record(record)
        self.store.update_manifest(
            session_id,
            annotation={"outcome": outcome, "error_category": error_category, "note": note},
        )
        return record

    def abort(self, session_id: str, wait_s: float = 10.0) -> SessionRecord:
        session = self._get(session_id)
        if session.record.terminal:
            raise SessionStateError(f"session is already terminal ({session.record.status})")
        session.abort_event.set()
        if session.gate is not None:
            session.gate.abort()
        if session.thread is not None:
            session.thread.join(timeout=wait_s)
        return session.record

    def shutdown(self) -> None:
        with self._lock:
            live = [s for s in self._sessions.values() if not s.record.terminal]
        for session in live:
            try:
                self.abort(session.record.session_id)
            except SessionStateError:
                pass
