"""On-disk session layout: one directory per session, plus a listing index.

    <data_dir>/sessions/<session_id>/
        manifest.json   # trace manifest fields + "session" record
        trace.jsonl     # one step per line
        events.jsonl    # one event per line, monotonically numbered
        script.jsonl    # the scripted-adapter input, when one was used
        shot_<n>.png    # screenshots
    <data_dir>/index.json

Everything is plain JSON on purpose: sessions stay replayable and diffable
with no database.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from deskagent.agent.trace import EpisodeTrace, dumps_line, step_to_dict
from deskagent.service.records import SessionRecord

MANIFEST_FILE = "manifest.json"
TRACE_FILE = "trace.jsonl"
EVENTS_FILE = "events.jsonl"
INDEX_FILE = "index.json"


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=".tmp_")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


class SessionStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.sessions_root = self.root / "sessions"
        self.sessions_root.mkdir(parents=True, exist_ok=True)

    def session_dir(self, session_id: str) -> Path:
        return self.sessions_root / session_id

    def create_session_dir(self, session_id: str) -> Path:
        directory = self.session_dir(session_id)
        directory.mkdir(parents=True, exist_ok=True)
        return directory

    # -- manifest ----------------------------------------------------------

    def read_manifest(self, session_id: str) -> dict:
        path = self.session_dir(session_id) / MANIFEST_FILE
        if not path.exists():
            return {}
        return json.loads(path.read_text("utf-8"))

    def update_manifest(self, session_id: str, **parts) -> dict:
        manifest = self.read_manifest(session_id)
        manifest.update(parts)
        path = self.session_dir(session_id) / MANIFEST_FILE
        _atomic_write(path, json.dumps(manifest, sort_keys=True, indent=2) + "\n")
        return manifest

    def save_record(self, record: SessionRecord) -> None:
        self.create_session_dir(record.session_id)
        self.update_manifest(record.session_id, session=record.to_dict())
        self._update_index(record)

    def save_trace(self, session_id: str, trace: EpisodeTrace) -> None:
        directory = self.create_session_dir(session_id)
        lines = [dumps_line(step_to_dict(s)) for s in trace.steps]
        _atomic_write(
            directory / TRACE_FILE, "".join(line + "\n" for line in lines)
        )
        self.update_manifest(
            session_id,
            episode_id=trace.episode_id,
            instruction={
                "text": trace.instruction.text,
                "domain_tag": trace.instruction.domain_tag,
            },
            final_status=trace.final_status,
            config=trace.config,
        )

    # -- events ------------------------------------------------------------

    def append_event(self, session_id: str, event: dict) -> None:
        directory = self.create_session_dir(session_id)
        with open(directory / EVENTS_FILE, "a", encoding="utf-8") as fh:
            fh.write(dumps_line(event) + "\n")

    def load_events(self, session_id: str) -> list[dict]:
        path = self.session_dir(session_id) / EVENTS_FILE
        if not path.exists():
            return []
        events = []
        for line in path.read_text("utf-8").splitlines():
            if line.strip():
                events.append(json.loads(line))
        return events

    # -- listing -----------------------------------------------------------

    def scan(self) -> list[tuple[str, dict]]:
        """(session_id, manifest) for every persisted session."""
        found = []
        for child in sorted(self.sessions_root.iterdir()) if self.sessions_root.exists() else []:
            manifest = child / MANIFEST_FILE
            if child.is_dir() and manifest.exists():
                found.append((child.name, json.loads(manifest.read_text("utf-8"))))
        return found

    def _update_index(self, record: SessionRecord) -> None:
        index_path = self.root / INDEX_FILE
        index: dict = {"sessions": {}}
        if index_path.exists():
            try:
                index = json.loads(index_path.read_text("utf-8"))
            except ValueError:
                index = {"sessions": {}}
        index.setdefault("sessions", {})[record.session_id] = {
            "status": record.status,
            "outcome": record.outcome,
            "created_at": record.created_at,
        }
        _atomic_write(index_path, json.dumps(index, sort_keys=True, indent=2) + "\n")

    def screenshot_path(self, session_id: str, index: int) -> Path:
        return self.session_dir(session_id) / f"shot_{index}.png"
