"""Live OS backend over pyautogui (optional extra).

Construction fails with BackendUnavailable when pyautogui is missing or no
display is reachable; the runtime then reports the capability absent instead
of emulating. A driver object can be injected for tests.

The OS pointer and keyboard are process-global, so all LiveDesktop instances
share one exclusive execution lane: every injection or capture holds a
process-wide lock, keeping concurrent sessions from interleaving raw input.
"""

from __future__ import annotations

import threading

import numpy as np

from deskagent.backends.base import Capabilities, InputBackend, Point
from deskagent.errors import BackendError, BackendUnavailable

TYPE_INTERVAL_S = 0.012  # fixed inter-key delay while typing

# xdotool-style symbols -> pyautogui key names
_KEY_MAP = {
    "ctrl": "ctrl", "control": "ctrl", "Control_L": "ctrlleft", "Control_R": "ctrlright",
    "alt": "alt", "Alt_L": "altleft", "Alt_R": "altright",
    "shift": "shift", "Shift_L": "shiftleft", "Shift_R": "shiftright",
    "super": "win", "Super_L": "winleft", "Super_R": "winright",
    "meta": "win", "win": "win", "cmd": "command",
    "Return": "enter", "Tab": "tab", "space": "space", "BackSpace": "backspace",
    "Delete": "delete", "Escape": "esc", "Insert": "insert",
    "Home": "home", "End": "end",
    "Prior": "pageup", "Next": "pagedown", "Page_Up": "pageup", "Page_Down": "pagedown",
    "Up": "up", "Down": "down", "Left": "left", "Right": "right",
    "Caps_Lock": "capslock", "Num_Lock": "numlock", "Scroll_Lock": "scrolllock",
    "Print": "printscreen", "Pause": "pause", "Menu": "apps",
    "minus": "-", "plus": "+", "equal": "=", "underscore": "_",
    "comma": ",", "period": ".", "slash": "/", "backslash": "\\",
    "semicolon": ";", "apostrophe": "'", "grave": "`",
    "KP_Enter": "enter", "KP_Add": "add", "KP_Subtract": "subtract",
    "KP_Multiply": "multiply", "KP_Divide": "divide", "KP_Decimal": "decimal",
}
_KEY_MAP.update({f"F{i}": f"f{i}" for i in range(1, 25)})
_KEY_MAP.update({f"KP_{i}": f"num{i}" for i in range(10)})


def map_key_symbol(symbol: str) -> str:
    if symbol in _KEY_MAP:
        return _KEY_MAP[symbol]
    if len(symbol) == 1:
        return symbol
    raise BackendError(f"no live mapping for key symbol {symbol!r}")


class LiveDesktop(InputBackend):
    # one lane for the whole process: the OS has a single pointer/keyboard
    _lane = threading.RLock()

    def __init__(self, driver=None):
        if driver is None:
            try:
                import pyautogui  # noqa: PLC0415 - optional dependency
            except Exception as exc:  # ImportError or display probing failures
                raise BackendUnavailable(f"live backend unavailable: {exc}") from exc
            driver = pyautogui
        self._driver = driver
        try:
            size = driver.size()
        except Exception as exc:
            raise BackendUnavailable(f"live backend unavailable: {exc}") from exc
        self._resolution = (int(size[0]), int(size[1]))

    @property
    def capabilities(self) -> Capabilities:
        return Capabilities(can_capture=True, can_inject=True)

    @property
    def physical_resolution(self) -> tuple[int, int]:
        return self._resolution

    def move_to(self, p: Point) -> None:
        with self._lane:
            self._driver.moveTo(p[0], p[1])

    def click(self, button: str = "left", count: int = 1) -> None:
        with self._lane:
            self._driver.click(button=button, clicks=count)

    def drag_to(self, p: Point, duration: float) -> None:
        with self._lane:
            self._driver.dragTo(p[0], p[1], duration=duration, button="left")

    def press_chord(self, symbols: list[str]) -> None:
        keys = [map_key_symbol(s) for s in symbols]
        with self._lane:
            self._driver.hotkey(*keys)

    def type_text(self, text: str) -> None:
        with self._lane:
            self._driver.write(text, interval=TYPE_INTERVAL_S)

    def cursor_position(self) -> Point:
        with self._lane:
            pos = self._driver.position()
        return (int(pos[0]), int(pos[1]))

    def capture_frame(self) -> np.ndarray:
        with self._lane:
            shot = self._driver.screenshot()
        frame = np.asarray(shot)
        if frame.ndim != 3:
            raise BackendError(f"unusable frame shape {frame.shape}")
        return frame[:, :, :3].astype(np.uint8)
