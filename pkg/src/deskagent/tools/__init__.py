"""Tool executors: computer, editor, bash."""

from deskagent.tools.computer import (
    ComputerTool,
    ScreenshotImage,
    ScreenshotStore,
    capture_screenshot,
    execute_action,
)
from deskagent.tools.editor import Editor, EditorCommand, EditorTool
from deskagent.tools.shell import BashRequest, BashSession, BashTool

__all__ = [
    "BashRequest",
    "BashSession",
    "BashTool",
    "ComputerTool",
    "Editor",
    "EditorCommand",
    "EditorTool",
    "ScreenshotImage",
    "ScreenshotStore",
    "capture_screenshot",
    "execute_action",
]
