from __future__ import annotations

import pytest

from deskagent.actions import (
    GuiAction,
    KEY_SYMBOLS,
    action_from_arguments,
    parse_action_text,
    parse_key_chord,
)
from deskagent.errors import (
    ActionArgumentError,
    BoundsError,
    UnknownAction,
    UnknownKeySymbol,
)
from deskagent.screen import DisplayGeometry
from deskagent.transcript.builtin import COMPUTER_ACTIONS


class TestParseActionText:
    def test_mouse_move(self):
        action = parse_action_text("mouse_move(100, 150)")
        assert action == GuiAction("mouse_move", point=(100, 150))

    def test_left_click_drag_with_duration(self):
        action = parse_action_text("left_click_drag(100, 200, duration=2)")
        assert action.name == "left_click_drag"
        assert action.point == (100, 200)
        assert action.duration == 2.0

    def test_key_chord_with_spaces(self):
        action = parse_action_text("key('ctrl + c')")
        assert action == GuiAction("key", text="ctrl + c")

    def test_type_string(self):
        action = parse_action_text("type('Hello, world!')")
        assert action == GuiAction("type", text="Hello, world!")

    def test_bare_actions(self):
        assert parse_action_text("left_click()") == GuiAction("left_click")
        assert parse_action_text("screenshot()") == GuiAction("screenshot")
        assert parse_action_text("cursor_position()") == GuiAction("cursor_position")

    def test_enum_closure_accepts_exactly_the_ten_names(self):
        samples = {
            "key": "key('a')",
            "type": "type('x')",
            "mouse_move": "mouse_move(1, 2)",
            "left_click": "left_click()",
            "left_click_drag": "left_click_drag(1, 2)",
            "right_click": "right_click()",
            "middle_click": "middle_click()",
            "double_click": "double_click()",
            "screenshot": "screenshot()",
            "cursor_position": "cursor_position()",
        }
        assert set(samples) == set(COMPUTER_ACTIONS)
        for text in samples.values():
            parse_action_text(text)  # must not raise
        for bad in ("scroll(1)", "hover(3, 4)", "fly()", "Key('a')"):
            with pytest.raises(UnknownAction):
                parse_action_text(bad)

    @pytest.mark.parametrize(
        "bad",
        [
            "mouse_move(1)",
            "mouse_move(1, 2, 3)",
            "mouse_move(1.5, 2)",
            "mouse_move('a', 'b')",
            "left_click(5, 6)",
            "screenshot(1)",
            "key()",
            "type(3)",
            "left_click_drag(1, 2, speed=3)",
            "mouse_move(x, y)",
            "not even a call",
            "mouse_move(1, 2) + 3",
        ],
    )
    def test_argument_errors(self, bad):
        with pytest.raises(ActionArgumentError):
            parse_action_text(bad)

    def test_negative_coordinates_rejected(self):
        with pytest.raises(ActionArgumentError):
            parse_action_text("mouse_move(-1, 5)")


class TestGuiActionInvariants:
    def test_points_only_on_pointer_actions(self):
        with pytest.raises(ActionArgumentError):
            GuiAction("left_click", point=(1, 2))
        with pytest.raises(ActionArgumentError):
            GuiAction("mouse_move")

    def test_text_only_on_keyboard_actions(self):
        with pytest.raises(ActionArgumentError):
            GuiAction("screenshot", text="x")
        with pytest.raises(ActionArgumentError):
            GuiAction("key")

    def test_duration_only_on_drag(self):
        with pytest.raises(ActionArgumentError):
            GuiAction("mouse_move", point=(1, 2), duration=1.0)
        with pytest.raises(ActionArgumentError):
            GuiAction("left_click_drag", point=(1, 2), duration=0)

    def test_bounds_check_against_model_resolution(self):
        geom = DisplayGeometry((100, 50), (100, 50))
        GuiAction("mouse_move", point=(99, 49)).check_bounds(geom)
        with pytest.raises(BoundsError):
            GuiAction("mouse_move", point=(100, 10)).check_bounds(geom)

    def test_from_arguments(self):
        action = action_from_arguments({"action": "mouse_move", "coordinate": [4, 5]})
        assert action.point == (4, 5)
        with pytest.raises(ActionArgumentError):
            action_from_arguments({"action": "mouse_move", "coordinate": [4]})
        with pytest.raises(UnknownAction):
            action_from_arguments({"action": "warp"})


class TestKeyChords:
    @pytest.mark.parametrize(
        "chord,expected",
        [
            ("a", ["a"]),
            ("Return", ["Return"]),
            ("alt+Tab", ["alt", "Tab"]),
            ("ctrl+s", ["ctrl", "s"]),
            ("Up", ["Up"]),
            ("KP_0", ["KP_0"]),
            ("ctrl+shift+T", ["ctrl", "shift", "T"]),
            ("Page_Down", ["Page_Down"]),
            ("Escape", ["Escape"]),
        ],
    )
    def test_documented_examples(self, chord, expected):
        assert parse_key_chord(chord) == expected

    def test_whitespace_tolerance_matches_tight_spelling(self):
        # oracle: normalizing whitespace first must give the same parse
        for spaced, tight in [("ctrl + s", "ctrl+s"), ("alt +Tab", "alt+Tab")]:
            normalized = "+".join(t.strip() for t in spaced.split("+"))
            assert normalized == tight
            assert parse_key_chord(spaced) == parse_key_chord(tight)

    def test_unknown_symbols_error_with_token(self):
        with pytest.raises(UnknownKeySymbol) as err:
            parse_key_chord("ctrl+frob")
        assert err.value.token == "frob"
        with pytest.raises(UnknownKeySymbol):
            parse_key_chord("")
        with pytest.raises(UnknownKeySymbol):
            parse_key_chord("a++b")

    def test_single_printable_characters_accepted(self):
        for ch in "azAZ09,.;'[]`~!@#$%^&*()":
            assert parse_key_chord(ch) == [ch]

    def test_named_keys_are_case_sensitive(self):
        assert "Return" in KEY_SYMBOLS
        with pytest.raises(UnknownKeySymbol):
            parse_key_chord("return")
