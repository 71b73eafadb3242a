"""Deterministic simulated desktop: a widget scene that renders and reacts.

The scene is loaded from a plain-text fixture (see FIXTURES.md). Clicks
dispatch to the topmost widget under the cursor, typing goes to the focused
text field, and rendering is a pure function of scene state, so identical
action sequences from identical scenes produce identical event logs and
identical frames.
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from deskagent.backends.base import Capabilities, InputBackend, Point
from deskagent.backends.bitfont import draw_text
from deskagent.errors import BackendError

WIDGET_KINDS = ("button", "text_field", "icon")

_BACKGROUND = (238, 238, 242)
_FILL = {
    "button": (66, 103, 178),
    "text_field": (255, 255, 255),
    "icon": (224, 146, 60),
}
_BORDER = {
    "button": (40, 62, 107),
    "text_field": (120, 120, 128),
    "icon": (134, 88, 36),
}
_TEXT = {
    "button": (255, 255, 255),
    "text_field": (16, 16, 16),
    "icon": (40, 24, 8),
}
_PLACEHOLDER = (150, 150, 150)


@dataclass
class Widget:
    widget_id: str
    kind: str
    x: int
    y: int
    w: int
    h: int
    z: int = 0
    label: str = ""
    effect: str | None = None  # "increment:<counter>" | "submit:<counter>"

    def contains(self, p: Point) -> bool:
        return self.x <= p[0] < self.x + self.w and self.y <= p[1] < self.y + self.h


@dataclass
class Scene:
    resolution: tuple[int, int]
    widgets: list[Widget] = field(default_factory=list)
    counters: dict[str, int] = field(default_factory=dict)
    cursor: Point = (0, 0)

    def widget(self, widget_id: str) -> Widget:
        for w in self.widgets:
            if w.widget_id == widget_id:
                return w
        raise KeyError(widget_id)


def parse_scene(text: str) -> Scene:
    """Parse the fixture format: resolution/cursor/counter/widget lines."""
    resolution: tuple[int, int] | None = None
    cursor: Point = (0, 0)
    widgets: list[Widget] = []
    counters: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            tokens = shlex.split(line)
        except ValueError as exc:
            raise ValueError(f"fixture line {lineno}: {exc}") from exc
        head, rest = tokens[0], tokens[1:]
        if head == "resolution":
            resolution = (int(rest[0]), int(rest[1]))
        elif head == "cursor":
            cursor = (int(rest[0]), int(rest[1]))
        elif head == "counter":
            counters[rest[0]] = int(rest[1]) if len(rest) > 1 else 0
        elif head == "widget":
            attrs: dict[str, str] = {}
            for item in rest:
                if "=" not in item:
                    raise ValueError(f"fixture line {lineno}: expected key=value, got {item!r}")
                key, value = item.split("=", 1)
                attrs[key] = value
            try:
                widget = Widget(
                    widget_id=attrs["id"],
                    kind=attrs["kind"],
                    x=int(attrs["x"]),
                    y=int(attrs["y"]),
                    w=int(attrs["w"]),
                    h=int(attrs["h"]),
                    z=int(attrs.get("z", "0")),
                    label=attrs.get("label", ""),
                    effect=attrs.get("effect"),
                )
            except KeyError as exc:
                raise ValueError(f"fixture line {lineno}: missing widget attribute {exc}") from exc
            if widget.kind not in WIDGET_KINDS:
                raise ValueError(f"fixture line {lineno}: unknown widget kind {widget.kind!r}")
            if widget.w < 1 or widget.h < 1:
                raise ValueError(f"fixture line {lineno}: widget needs positive bounds")
            if any(w.widget_id == widget.widget_id for w in widgets):
                raise ValueError(f"fixture line {lineno}: duplicate widget id {widget.widget_id!r}")
            widgets.append(widget)
        else:
            raise ValueError(f"fixture line {lineno}: unknown directive {head!r}")
    if resolution is None:
        raise ValueError("fixture must declare a resolution")
    return Scene(resolution=resolution, widgets=widgets, counters=counters, cursor=cursor)


def load_scene(path: str | Path) -> Scene:
    return parse_scene(Path(path).read_text(encoding="utf-8"))


def _format_label(label: str, counters: dict[str, int]) -> str:
    try:
        return label.format_map({k: str(v) for k, v in counters.items()})
    except (KeyError, ValueError, IndexError):
        return label


def render_scene(scene: Scene, text_buffers: dict[str, str] | None = None) -> np.ndarray:
    """Rasterize the scene to an (H, W, 3) uint8 frame."""
    text_buffers = text_buffers or {}
    width, height = scene.resolution
    img = np.empty((height, width, 3), dtype=np.uint8)
    img[:, :] = _BACKGROUND
    for widget in sorted(scene.widgets, key=lambda w: w.z):
        x0, y0 = max(widget.x, 0), max(widget.y, 0)
        x1 = min(widget.x + widget.w, width)
        y1 = min(widget.y + widget.h, height)
        if x1 <= x0 or y1 <= y0:
            continue
        img[y0:y1, x0:x1] = _FILL[widget.kind]
        img[y0, x0:x1] = _BORDER[widget.kind]
        img[y1 - 1, x0:x1] = _BORDER[widget.kind]
        img[y0:y1, x0] = _BORDER[widget.kind]
        img[y0:y1, x1 - 1] = _BORDER[widget.kind]
        if widget.kind == "text_field" and text_buffers.get(widget.widget_id):
            text = text_buffers[widget.widget_id]
            color = _TEXT[widget.kind]
        else:
            text = _format_label(widget.label, scene.counters)
            color = _PLACEHOLDER if widget.kind == "text_field" else _TEXT[widget.kind]
        if text:
            ty = widget.y + max((widget.h - 14) // 2, 2)
            draw_text(img, widget.x + 6, ty, text, color, scale=2, max_x=x1 - 4)
    return img


class SimulatedDesktop(InputBackend):
    """InputBackend over a Scene; every injected event lands in event_log."""

    def __init__(self, scene: Scene):
        self.scene = scene
        self.cursor: Point = scene.cursor
        self.focus: str | None = None
        self.event_log: list[str] = []
        self.text_buffers: dict[str, str] = {}

    @property
    def capabilities(self) -> Capabilities:
        return Capabilities(can_capture=True, can_inject=True)

    @property
    def physical_resolution(self) -> tuple[int, int]:
        return self.scene.resolution

    def _hit_test(self, p: Point) -> Widget | None:
        best: tuple[int, int] | None = None
        found: Widget | None = None
        for index, widget in enumerate(self.scene.widgets):
            if widget.contains(p) and (best is None or (widget.z, index) > best):
                best = (widget.z, index)
                found = widget
        return found

    def _apply_effect(self, effect: str | None, trigger: str) -> None:
        if not effect:
            return
        kind, _, counter = effect.partition(":")
        if kind == trigger and counter:
            self.scene.counters[counter] = self.scene.counters.get(counter, 0) + 1

    def move_to(self, p: Point) -> None:
        width, height = self.scene.resolution
        if not (0 <= p[0] < width and 0 <= p[1] < height):
            raise BackendError(f"move outside display: {p}")
        self.cursor = (int(p[0]), int(p[1]))
        self.event_log.append(f"move({p[0]},{p[1]})")

    def click(self, button: str = "left", count: int = 1) -> None:
        target = self._hit_test(self.cursor)
        name = "double_click" if count == 2 else f"{button}_click"
        self.event_log.append(f"{name}({target.widget_id if target else '-'})")
        if target is None:
            self.focus = None
            return
        if target.kind == "text_field":
            self.focus = target.widget_id
        elif button == "left":
            self.focus = None
        if button == "left":
            self._apply_effect(target.effect, "increment")

    def drag_to(self, p: Point, duration: float) -> None:
        width, height = self.scene.resolution
        if not (0 <= p[0] < width and 0 <= p[1] < height):
            raise BackendError(f"drag outside display: {p}")
        x0, y0 = self.cursor
        self.cursor = (int(p[0]), int(p[1]))
        self.event_log.append(f"drag({x0},{y0}->{p[0]},{p[1]})")

    def press_chord(self, symbols: list[str]) -> None:
        chord = "+".join(symbols)
        self.event_log.append(f"key({chord},{self.focus or '-'})")
        if self.focus and "Return" in symbols:
            try:
                widget = self.scene.widget(self.focus)
            except KeyError:
                return
            self._apply_effect(widget.effect, "submit")

    def type_text(self, text: str) -> None:
        self.event_log.append(f"type({self.focus or '-'},{text!r})")
        if self.focus:
            self.text_buffers[self.focus] = self.text_buffers.get(self.focus, "") + text

    def cursor_position(self) -> Point:
        return self.cursor

    def capture_frame(self) -> np.ndarray:
        return render_scene(self.scene, self.text_buffers)
