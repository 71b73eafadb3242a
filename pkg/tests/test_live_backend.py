from __future__ import annotations

import numpy as np
import pytest

from deskagent.backends.live import LiveDesktop, map_key_symbol, TYPE_INTERVAL_S
from deskagent.errors import BackendError, BackendUnavailable
from deskagent.screen import DisplayGeometry
from deskagent.tools.computer import ComputerTool
from deskagent.transcript.types import ToolInvocation


class FakeDriver:
    """Records pyautogui-style calls; returns a fixed screen."""

    def __init__(self, size=(1920, 1080)):
        self._size = size
        self.calls: list[tuple] = []
        self._pos = (0, 0)

    def size(self):
        return self._size

    def moveTo(self, x, y):
        self._pos = (x, y)
        self.calls.append(("moveTo", x, y))

    def click(self, button="left", clicks=1):
        self.calls.append(("click", button, clicks))

    def dragTo(self, x, y, duration=0.0, button="left"):
        self._pos = (x, y)
        self.calls.append(("dragTo", x, y, duration, button))

    def hotkey(self, *keys):
        self.calls.append(("hotkey",) + keys)

    def write(self, text, interval=0.0):
        self.calls.append(("write", text, interval))

    def position(self):
        return self._pos

    def screenshot(self):
        return np.zeros((self._size[1], self._size[0], 3), dtype=np.uint8)


class TestLiveDesktop:
    def test_construction_without_driver_or_display_reports_unavailable(self, monkeypatch):
        import builtins

        real_import = builtins.__import__

        def no_pyautogui(name, *args, **kwargs):
            if name == "pyautogui":
                raise ImportError("no display")
            return real_import(name, *args, **kwargs)

        monkeypatch.setattr(builtins, "__import__", no_pyautogui)
        with pytest.raises(BackendUnavailable):
            LiveDesktop()

    def test_actions_map_to_driver_calls(self):
        driver = FakeDriver()
        desk = LiveDesktop(driver=driver)
        assert desk.physical_resolution == (1920, 1080)
        desk.move_to((10, 20))
        desk.click()
        desk.click(button="left", count=2)
        desk.drag_to((30, 40), duration=0.5)
        desk.press_chord(["ctrl", "s"])
        desk.press_chord(["alt", "Tab"])
        desk.type_text("hey")
        assert desk.cursor_position() == (30, 40)
        frame = desk.capture_frame()
        assert frame.shape == (1080, 1920, 3)
        assert driver.calls == [
            ("moveTo", 10, 20),
            ("click", "left", 1),
            ("click", "left", 2),
            ("dragTo", 30, 40, 0.5, "left"),
            ("hotkey", "ctrl", "s"),
            ("hotkey", "alt", "tab"),
            ("write", "hey", TYPE_INTERVAL_S),
        ]

    def test_full_tool_stack_over_fake_driver_scales_coordinates(self):
        driver = FakeDriver()
        desk = LiveDesktop(driver=driver)
        geom = DisplayGeometry((1366, 768), desk.physical_resolution)
        tool = ComputerTool(desk, geom)
        tool.execute(
            ToolInvocation("c", "computer", {"action": "mouse_move", "coordinate": [683, 384]})
        )
        assert driver.calls[-1] == ("moveTo", 960, 540)
        result = tool.execute(ToolInvocation("c2", "computer", {"action": "cursor_position"}))
        assert result.text == "(683, 384)"
        shot = tool.execute(ToolInvocation("c3", "computer", {"action": "screenshot"}))
        image = tool.store.get(shot.content[0].ref)
        assert (image.width, image.height) == (1366, 768)


class TestKeyMapping:
    @pytest.mark.parametrize(
        "symbol,expected",
        [
            ("ctrl", "ctrl"),
            ("super", "win"),
            ("cmd", "command"),
            ("Return", "enter"),
            ("Page_Down", "pagedown"),
            ("Prior", "pageup"),
            ("KP_0", "num0"),
            ("F11", "f11"),
            ("a", "a"),
            ("Escape", "esc"),
        ],
    )
    def test_known_symbols(self, symbol, expected):
        assert map_key_symbol(symbol) == expected

    def test_unknown_named_symbol_is_a_backend_error(self):
        with pytest.raises(BackendError):
            map_key_symbol("Hyper_Shift")
