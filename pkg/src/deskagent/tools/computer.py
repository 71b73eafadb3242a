"""Computer tool: execute GUI actions against an input backend.

Clicks land at the current cursor position (the schema gives them no
coordinate; the move-then-click protocol positions the cursor first). Pointer
coordinates arrive in model space and are scaled to physical pixels on the way
in; cursor queries are scaled back out. Screenshots are captured at physical
resolution and reduced to model resolution by area averaging.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from deskagent.actions import (
    DEFAULT_DRAG_SECONDS,
    GuiAction,
    action_from_arguments,
    parse_key_chord,
)
from deskagent.backends.base import InputBackend
from deskagent.clock import Clock, wall_clock
from deskagent.errors import CaptureError, DeskAgentError
from deskagent.kernels import downscale_area
from deskagent.screen import DisplayGeometry, scale_to_model, scale_to_physical
from deskagent.transcript.builtin import COMPUTER_TOOL
from deskagent.transcript.types import ToolInvocation, ToolResult
from deskagent.transcript.validate import coerce_arguments


@dataclass(frozen=True)
class ScreenshotImage:
    """One captured frame, already at model resolution."""

    width: int
    height: int
    pixels: np.ndarray
    captured_at_ms: int
    sequence_index: int

    @property
    def ref(self) -> str:
        return f"shot_{self.sequence_index}"

    def png_bytes(self) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(self.pixels, mode="RGB").save(buf, format="PNG")
        return buf.getvalue()


def png_to_pixels(data: bytes) -> np.ndarray:
    with Image.open(io.BytesIO(data)) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


class ScreenshotStore:
    """Ordered per-episode screenshot storage, optionally persisted as PNG.

    Files land at ``<directory>/shot_<sequence_index>.png``.
    """

    def __init__(self, directory: str | Path | None = None):
        self.directory = Path(directory) if directory is not None else None
        self.shots: list[ScreenshotImage] = []

    def next_index(self) -> int:
        return len(self.shots)

    def add(self, shot: ScreenshotImage) -> str:
        if self.shots and shot.sequence_index <= self.shots[-1].sequence_index:
            raise ValueError("screenshot sequence must be strictly increasing")
        self.shots.append(shot)
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)
            (self.directory / f"{shot.ref}.png").write_bytes(shot.png_bytes())
        return shot.ref

    def get(self, ref: str) -> ScreenshotImage:
        for shot in self.shots:
            if shot.ref == ref:
                return shot
        raise KeyError(ref)

    def path_for(self, ref: str) -> Path | None:
        if self.directory is None:
            return None
        return self.directory / f"{ref}.png"


def capture_screenshot(
    backend: InputBackend,
    geom: DisplayGeometry,
    sequence_index: int,
    at_ms: int,
) -> ScreenshotImage:
    """Capture a physical frame and downscale it to model resolution."""
    if not backend.capabilities.can_capture:
        raise CaptureError("backend cannot capture frames")
    frame = backend.capture_frame()
    if frame.ndim != 3 or frame.shape[2] != 3:
        raise CaptureError(f"unusable frame shape {frame.shape}")
    width, height = geom.model_resolution
    pixels = downscale_area(frame, (width, height))
    return ScreenshotImage(
        width=width,
        height=height,
        pixels=pixels,
        captured_at_ms=at_ms,
        sequence_index=sequence_index,
    )


def execute_action(
    backend: InputBackend,
    geom: DisplayGeometry,
    action: GuiAction,
    call_id: str = "",
    store: ScreenshotStore | None = None,
    clock: Clock = wall_clock,
) -> ToolResult:
    """Run one validated action; failures become error results, not raises."""
    try:
        action.check_bounds(geom)
        if action.name == "screenshot":
            if store is None:
                store = ScreenshotStore()
            shot = capture_screenshot(backend, geom, store.next_index(), clock())
            ref = store.add(shot)
            return ToolResult.ok(call_id, images=(ref,))
        if action.name == "cursor_position":
            x, y = scale_to_model(geom, backend.cursor_position())
            return ToolResult.ok(call_id, f"({x}, {y})")
        if not backend.capabilities.can_inject:
            return ToolResult.error(call_id, "backend cannot inject input")
        if action.name == "mouse_move":
            backend.move_to(scale_to_physical(geom, action.point))
            return ToolResult.ok(call_id, f"Moved mouse to ({action.point[0]}, {action.point[1]}).")
        if action.name == "left_click_drag":
            seconds = action.duration if action.duration is not None else DEFAULT_DRAG_SECONDS
            backend.drag_to(scale_to_physical(geom, action.point), seconds)
            return ToolResult.ok(call_id, f"Dragged to ({action.point[0]}, {action.point[1]}).")
        if action.name in ("left_click", "right_click", "middle_click"):
            backend.click(button=action.name.split("_")[0])
            return ToolResult.ok(call_id, f"Performed {action.name}.")
        if action.name == "double_click":
            backend.click(button="left", count=2)
            return ToolResult.ok(call_id, "Performed double_click.")
        if action.name == "key":
            backend.press_chord(parse_key_chord(action.text))
            return ToolResult.ok(call_id, f"Pressed keys: {action.text}")
        if action.name == "type":
            backend.type_text(action.text)
            return ToolResult.ok(call_id, f"Typed {len(action.text)} characters.")
        return ToolResult.error(call_id, f"unsupported action {action.name!r}")
    except DeskAgentError as exc:
        return ToolResult.error(call_id, str(exc))
    except Exception as exc:  # tool boundary: never raise past it
        return ToolResult.error(call_id, f"{type(exc).__name__}: {exc}")


class ComputerTool:
    """Invocation-facing wrapper owning the screenshot sequence for a session."""

    def __init__(
        self,
        backend: InputBackend,
        geom: DisplayGeometry,
        store: ScreenshotStore | None = None,
        clock: Clock = wall_clock,
    ):
        self.backend = backend
        self.geom = geom
        self.store = store if store is not None else ScreenshotStore()
        self.clock = clock

    @property
    def definition(self):
        return COMPUTER_TOOL

    def execute(self, invocation: ToolInvocation) -> ToolResult:
        try:
            action = action_from_arguments(coerce_arguments(COMPUTER_TOOL, invocation))
        except DeskAgentError as exc:
            return ToolResult.error(invocation.call_id, str(exc))
        return execute_action(
            self.backend,
            self.geom,
            action,
            call_id=invocation.call_id,
            store=self.store,
            clock=self.clock,
        )
