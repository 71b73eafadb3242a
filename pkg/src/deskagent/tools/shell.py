"""Bash tool: one persistent shell per session with restart and timeouts.

Each command is followed by a sentinel line carrying a fresh random token and
the exit status; the reader collects combined stdout+stderr until the sentinel
arrives. On timeout the session is marked suspect (stale output could bleed
into the next command), so further commands are refused until a restart.
"""

from __future__ import annotations

import os
import queue
import shutil
import signal
import subprocess
import threading
import time
import uuid
from dataclasses import dataclass

from deskagent.errors import DeskAgentError
from deskagent.transcript.builtin import BASH_TOOL
from deskagent.transcript.types import ToolInvocation, ToolResult
from deskagent.transcript.validate import coerce_arguments

OUTPUT_CAP = 30000
CLIP_MARKER = "<output clipped>"
DEFAULT_TIMEOUT_S = 120.0


class ShellUnavailable(DeskAgentError):
    """No POSIX-compatible shell on this host."""


@dataclass(frozen=True)
class BashRequest:
    command: str | None = None
    restart: bool = False

    def __post_init__(self) -> None:
        if self.command is None and not self.restart:
            raise ValueError("command is required unless restart=true")


def _clip(text: str, budget: int) -> str:
    if len(text) <= budget:
        return text
    return text[:budget] + CLIP_MARKER


class BashSession:
    """Single shell process; commands execute serially within a generation."""

    def __init__(
        self,
        timeout_s: float = DEFAULT_TIMEOUT_S,
        output_cap: int = OUTPUT_CAP,
        shell_path: str | None = None,
    ):
        self.timeout_s = timeout_s
        self.output_cap = output_cap
        self._shell_path = shell_path or shutil.which("bash") or shutil.which("sh")
        if self._shell_path is None:
            raise ShellUnavailable("no bash or sh on PATH")
        self.generation = 0
        self.suspect = False
        self._lock = threading.Lock()
        self._proc: subprocess.Popen | None = None
        self._chunks: queue.Queue[bytes | None] = queue.Queue()
        self._reader: threading.Thread | None = None
        self.started_at = time.time()
        self._spawn()

    def _spawn(self) -> None:
        self._proc = subprocess.Popen(
            [self._shell_path],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            start_new_session=True,
        )
        self._chunks = queue.Queue()
        self._reader = threading.Thread(
            target=self._read_loop, args=(self._proc, self._chunks), daemon=True
        )
        self._reader.start()
        self.started_at = time.time()

    @staticmethod
    def _read_loop(proc: subprocess.Popen, chunks: queue.Queue) -> None:
        stream = proc.stdout
        while True:
            data = stream.read1(65536) if hasattr(stream, "read1") else stream.read(1)
            if not data:
                chunks.put(None)
                return
            chunks.put(data)

    def _kill(self) -> None:
        proc = self._proc
        if proc is None:
            return
        try:
            os.killpg(proc.pid, signal.SIGKILL)
        except (ProcessLookupError, PermissionError):
            pass
        try:
            proc.wait(timeout=5)
        except subprocess.TimeoutExpired:  # pragma: no cover - SIGKILL suffices
            pass
        self._proc = None

    def restart(self) -> ToolResult:
        with self._lock:
            self._kill()
            self._spawn()
            self.generation += 1
            self.suspect = False
            return ToolResult.ok("", "tool restarted")

    def close(self) -> None:
        with self._lock:
            self._kill()

    def execute(self, request: BashRequest) -> ToolResult:
        if request.restart:
            return self.restart()
        assert request.command is not None
        with self._lock:
            return self._run(request.command)

    def _run(self, command: str) -> ToolResult:
        if self.suspect:
            return ToolResult.error(
                "",
                "session is suspect after a timeout or shell exit; "
                "restart the tool (restart=true) before running more commands",
            )
        proc = self._proc
        if proc is None or proc.poll() is not None:
            self.suspect = True
            return ToolResult.error("", "shell has exited; restart the tool (restart=true)")
        sentinel = f"__done_{uuid.uuid4().hex}__"
        payload = f"{command}\nprintf '\\n%s %s\\n' {sentinel} $?\n"
        try:
            proc.stdin.write(payload.encode("utf-8", errors="surrogateescape"))
            proc.stdin.flush()
        except (BrokenPipeError, OSError):
            self.suspect = True
            return ToolResult.error("", "shell has exited; restart the tool (restart=true)")

        marker = f"\n{sentinel} "
        buffer = ""
        deadline = time.monotonic() + self.timeout_s
        while True:
            at = buffer.find(marker)
            if at >= 0:
                line_end = buffer.find("\n", at + len(marker))
                if line_end >= 0:
                    output = buffer[:at]
                    status_text = buffer[at + len(marker) : line_end].strip()
                    try:
                        exit_status = int(status_text)
                    except ValueError:
                        exit_status = -1
                    return self._compose(output, exit_status)
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                self.suspect = True
                return ToolResult.error(
                    "",
                    f"command timed out after {self.timeout_s:g}s and the session "
                    "is now suspect; restart the tool (restart=true). For "
                    "long-lived commands, run them in the background (e.g. "
                    "`sleep 10 &`) instead.",
                )
            try:
                chunk = self._chunks.get(timeout=remaining)
            except queue.Empty:
                continue
            if chunk is None:
                self.suspect = True
                return ToolResult.error(
                    "",
                    "shell exited while running the command; restart the tool "
                    "(restart=true)",
                )
            buffer += chunk.decode("utf-8", errors="replace")

    def _compose(self, output: str, exit_status: int) -> ToolResult:
        note = f"\n[exit status: {exit_status}]"
        body = _clip(output, self.output_cap - len(note))
        return ToolResult.ok("", body + note)


class BashTool:
    """Invocation-facing wrapper; spawns the shell on first use."""

    def __init__(self, timeout_s: float = DEFAULT_TIMEOUT_S):
        self.timeout_s = timeout_s
        self._session: BashSession | None = None

    @property
    def definition(self):
        return BASH_TOOL

    @property
    def session(self) -> BashSession:
        if self._session is None:
            self._session = BashSession(timeout_s=self.timeout_s)
        return self._session

    def execute(self, invocation: ToolInvocation) -> ToolResult:
        args = coerce_arguments(BASH_TOOL, invocation)
        try:
            request = BashRequest(
                command=args.get("command"), restart=bool(args.get("restart", False))
            )
        except ValueError as exc:
            return ToolResult.error(invocation.call_id, str(exc))
        try:
            result = self.session.execute(request)
        except ShellUnavailable as exc:
            return ToolResult.error(invocation.call_id, str(exc))
        return ToolResult(
            call_id=invocation.call_id,
            status=result.status,
            content=result.content,
            error_message=result.error_message,
        )

    def close(self) -> None:
        if self._session is not None:
            self._session.close()
