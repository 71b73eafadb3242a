"""File editing tool: view, create, str_replace, insert, undo_edit.

Per-path undo history lives for the session. Failed commands never touch the
filesystem: every input is validated against the current content before the
single atomic write. File text is read and written with surrogateescape so
undo restores bytes exactly.

Rendering contract (kept bit-exact for tests): file views number lines
``cat -n`` style, a 6-wide right-aligned 1-based number, a tab, then the line;
output beyond TRUNCATE_BUDGET characters is cut and suffixed with the literal
marker in TRUNCATE_MARKER. Directory views list non-hidden children and
grandchildren lexicographically, directories suffixed with "/".
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from deskagent.transcript.builtin import EDITOR_TOOL
from deskagent.transcript.types import ToolInvocation, ToolResult
from deskagent.transcript.validate import coerce_arguments

TRUNCATE_BUDGET = 16000
TRUNCATE_MARKER = "<response clipped>"
SNIPPET_CONTEXT_LINES = 4

_ENCODING = dict(encoding="utf-8", errors="surrogateescape")


@dataclass(frozen=True)
class EditorCommand:
    command: str
    path: str
    file_text: str | None = None
    old_str: str | None = None
    new_str: str | None = None
    insert_line: int | None = None
    view_range: tuple[int, int] | None = None


class EditorError(Exception):
    """Raised internally; surfaces as an error ToolResult."""


def clip(text: str, budget: int = TRUNCATE_BUDGET) -> str:
    if len(text) <= budget:
        return text
    return text[:budget] + TRUNCATE_MARKER


def number_lines(lines: list[str], start: int = 1) -> str:
    return "".join(f"{i:6d}\t{line}\n" for i, line in enumerate(lines, start=start))


def split_displayed_lines(content: str) -> list[str]:
    """Lines as `cat -n` numbers them: a trailing newline ends the last line
    instead of opening an empty one."""
    if content == "":
        return []
    lines = content.split("\n")
    if lines[-1] == "":
        lines.pop()
    return lines


class Editor:
    def __init__(self, root_jail: str | Path | None = None):
        self.root_jail = Path(os.path.realpath(root_jail)) if root_jail else None
        self._history: dict[str, list[str | None]] = {}

    # -- path discipline -------------------------------------------------

    def _resolve(self, raw: str) -> Path:
        if not raw or not os.path.isabs(raw):
            raise EditorError(f"path must be absolute, got {raw!r}")
        resolved = Path(os.path.realpath(raw))
        if self.root_jail is not None:
            try:
                resolved.relative_to(self.root_jail)
            except ValueError:
                raise EditorError(f"path {raw!r} is outside the allowed root {str(self.root_jail)!r}") from None
        return resolved

    def _read(self, path: Path) -> str:
        if not path.exists():
            raise EditorError(f"path not found: {path}")
        if path.is_dir():
            raise EditorError(f"{path} is a directory; this command needs a file")
        try:
            return path.read_text(**_ENCODING)
        except OSError as exc:
            raise EditorError(f"cannot read {path}: {exc}") from exc

    def _write(self, path: Path, content: str) -> None:
        # temp-in-same-dir + rename keeps failed commands from leaving partial writes
        fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=".edit_")
        try:
            with os.fdopen(fd, "w", **_ENCODING) as fh:
                fh.write(content)
            os.replace(tmp, path)
        except OSError as exc:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise EditorError(f"cannot write {path}: {exc}") from exc

    # -- commands --------------------------------------------------------

    def execute(self, cmd: EditorCommand, call_id: str = "") -> ToolResult:
        try:
            path = self._resolve(cmd.path)
            handler = {
                "view": self._view,
                "create": self._create,
                "str_replace": self._str_replace,
                "insert": self._insert,
                "undo_edit": self._undo_edit,
            }.get(cmd.command)
            if handler is None:
                raise EditorError(f"unknown command {cmd.command!r}")
            return ToolResult.ok(call_id, handler(cmd, path))
        except EditorError as exc:
            return ToolResult.error(call_id, str(exc))
        except Exception as exc:  # tool boundary
            return ToolResult.error(call_id, f"{type(exc).__name__}: {exc}")

    def _view(self, cmd: EditorCommand, path: Path) -> str:
        if path.is_dir():
            if cmd.view_range is not None:
                raise EditorError("view_range only applies to files")
            return clip(self._view_directory(path))
        content = self._read(path)
        lines = split_displayed_lines(content)
        start = 1
        if cmd.view_range is not None:
            start, end = cmd.view_range
            if start < 1 or start > max(len(lines), 1):
                raise EditorError(
                    f"view_range start {start} out of range [1, {max(len(lines), 1)}]"
                )
            if end == -1:
                end = len(lines)
            if end < start or end > len(lines):
                raise EditorError(
                    f"view_range end {end} out of range [{start}, {len(lines)}]"
                )
            lines = lines[start - 1 : end]
        return clip(number_lines(lines, start=start))

    def _view_directory(self, path: Path) -> str:
        entries: list[str] = []
        try:
            children = sorted(p for p in path.iterdir() if not p.name.startswith("."))
        except OSError as exc:
            raise EditorError(f"cannot list {path}: {exc}") from exc
        for child in children:
            entries.append(child.name + ("/" if child.is_dir() else ""))
            if child.is_dir():
                try:
                    grandchildren = sorted(
                        p for p in child.iterdir() if not p.name.startswith(".")
                    )
                except OSError:
                    continue
                for grandchild in grandchildren:
                    entries.append(
                        f"{child.name}/{grandchild.name}"
                        + ("/" if grandchild.is_dir() else "")
                    )
        return "\n".join(entries) + ("\n" if entries else "")

    def _create(self, cmd: EditorCommand, path: Path) -> str:
        if path.exists():
            raise EditorError(f"cannot create {path}: path already exists")
        if not path.parent.is_dir():
            raise EditorError(f"cannot create {path}: parent directory does not exist")
        self._write(path, cmd.file_text or "")
        self._history.setdefault(str(path), []).append(None)
        return f"File created successfully at: {path}"

    def _snippet(self, content: str, around_line: int, span: int = 0) -> str:
        lines = split_displayed_lines(content)
        start = max(around_line - SNIPPET_CONTEXT_LINES, 1)
        end = min(around_line + span + SNIPPET_CONTEXT_LINES, len(lines))
        return number_lines(lines[start - 1 : end], start=start)

    def _str_replace(self, cmd: EditorCommand, path: Path) -> str:
        content = self._read(path)
        old_str = cmd.old_str or ""
        if not old_str:
            raise EditorError("old_str must be non-empty")
        # overlapping count: "aa" appears twice in "aaa" and is ambiguous
        count, scan = 0, content.find(old_str)
        while scan >= 0:
            count += 1
            scan = content.find(old_str, scan + 1)
        if count == 0:
            raise EditorError(
                f"old_str not found in {path}; no replacement performed. "
                "Make sure it matches the file content exactly, including whitespace."
            )
        if count > 1:
            raise EditorError(
                f"old_str occurs {count} times: it is not unique in the file, "
                "the replacement will not be performed. Include enough context "
                "to make it unique."
            )
        new_str = cmd.new_str or ""
        at = content.index(old_str)
        new_content = content[:at] + new_str + content[at + len(old_str) :]
        self._write(path, new_content)
        self._history.setdefault(str(path), []).append(content)
        line = content.count("\n", 0, at) + 1
        span = new_str.count("\n")
        return (
            f"The file {path} has been edited. Snippet of the result:\n"
            + clip(self._snippet(new_content, line, span))
        )

    def _insert(self, cmd: EditorCommand, path: Path) -> str:
        content = self._read(path)
        lines = content.split("\n")
        trailing_newline = bool(lines) and lines[-1] == ""
        displayed = len(lines) - 1 if trailing_newline else len(lines)
        if content == "":
            displayed = 0
        insert_line = cmd.insert_line if cmd.insert_line is not None else -1
        if insert_line < 0 or insert_line > displayed:
            raise EditorError(
                f"insert_line {insert_line} out of range [0, {displayed}]"
            )
        new_lines = (cmd.new_str or "").split("\n")
        if content == "":
            merged = new_lines
        else:
            merged = lines[:insert_line] + new_lines + lines[insert_line:]
        new_content = "\n".join(merged)
        self._write(path, new_content)
        self._history.setdefault(str(path), []).append(content)
        return (
            f"The file {path} has been edited. Snippet of the result:\n"
            + clip(self._snippet(new_content, insert_line + 1, len(new_lines) - 1))
        )

    def _undo_edit(self, cmd: EditorCommand, path: Path) -> str:
        stack = self._history.get(str(path))
        if not stack:
            raise EditorError(f"no edit history for {path}; nothing to undo")
        previous = stack.pop()
        if previous is None:
            try:
                os.unlink(path)
            except OSError as exc:
                stack.append(previous)
                raise EditorError(f"cannot undo create of {path}: {exc}") from exc
            return f"Last edit to {path} undone: file removed."
        try:
            self._write(path, previous)
        except EditorError:
            stack.append(previous)
            raise
        return f"Last edit to {path} undone successfully."


class EditorTool:
    """Invocation-facing wrapper around one Editor session."""

    def __init__(self, editor: Editor | None = None, root_jail: str | Path | None = None):
        self.editor = editor if editor is not None else Editor(root_jail=root_jail)

    @property
    def definition(self):
        return EDITOR_TOOL

    def execute(self, invocation: ToolInvocation) -> ToolResult:
        args = coerce_arguments(EDITOR_TOOL, invocation)
        view_range = args.get("view_range")
        cmd = EditorCommand(
            command=args.get("command", ""),
            path=args.get("path", ""),
            file_text=args.get("file_text"),
            old_str=args.get("old_str"),
            new_str=args.get("new_str"),
            insert_line=args.get("insert_line"),
            view_range=tuple(view_range) if view_range is not None else None,
        )
        if cmd.view_range is not None and len(cmd.view_range) != 2:
            return ToolResult.error(
                invocation.call_id, "view_range must be [start_line, end_line]"
            )
        return self.editor.execute(cmd, call_id=invocation.call_id)
