from __future__ import annotations

import numpy as np
import pytest

from deskagent.backends.simulated import (
    SimulatedDesktop,
    parse_scene,
    render_scene,
)
from deskagent.errors import BackendError

SCENE = """
# two overlapping widgets and a counter-backed badge
resolution 320 200
cursor 10 10
counter hits 0

widget id=under kind=icon x=40 y=40 w=120 h=60 z=1 label="Below"
widget id=over kind=button x=80 y=60 w=120 h=60 z=5 label="Above" effect=increment:hits
widget id=field kind=text_field x=40 y=130 w=200 h=40 z=1 label="Type here" effect=submit:hits
widget id=badge kind=icon x=200 y=10 w=110 h=30 z=1 label="hits {hits}"
"""


@pytest.fixture
def desk() -> SimulatedDesktop:
    return SimulatedDesktop(parse_scene(SCENE))


class TestSceneParsing:
    def test_round_trip_fields(self):
        scene = parse_scene(SCENE)
        assert scene.resolution == (320, 200)
        assert scene.cursor == (10, 10)
        assert scene.counters == {"hits": 0}
        assert [w.widget_id for w in scene.widgets] == ["under", "over", "field", "badge"]
        assert scene.widget("over").effect == "increment:hits"

    @pytest.mark.parametrize(
        "bad",
        [
            "widget id=a kind=button x=0 y=0 w=10 h=10",  # no resolution
            "resolution 100 100\nwidget id=a kind=blob x=0 y=0 w=5 h=5",
            "resolution 100 100\nwidget id=a kind=button x=0 y=0 w=0 h=5",
            "resolution 100 100\nwidget kind=button x=0 y=0 w=5 h=5",
            "resolution 100 100\nmystery 1 2",
            "resolution 100 100\nwidget id=a kind=button x=0 y=0 w=5 h=5\nwidget id=a kind=icon x=9 y=9 w=5 h=5",
        ],
    )
    def test_bad_fixtures_rejected(self, bad):
        with pytest.raises(ValueError):
            parse_scene(bad)


class TestHitTesting:
    def test_topmost_widget_wins(self, desk):
        desk.move_to((100, 80))  # inside both; "over" has higher z
        desk.click()
        assert desk.event_log[-1] == "left_click(over)"
        assert desk.scene.counters["hits"] == 1

    def test_click_outside_any_widget(self, desk):
        desk.move_to((5, 5))
        desk.click()
        assert desk.event_log[-1] == "left_click(-)"

    def test_right_click_does_not_fire_effects(self, desk):
        desk.move_to((100, 80))
        desk.click(button="right")
        assert desk.scene.counters["hits"] == 0
        assert desk.event_log[-1] == "right_click(over)"

    def test_double_click_logged_distinctly(self, desk):
        desk.move_to((100, 80))
        desk.click(count=2)
        assert desk.event_log[-1] == "double_click(over)"


class TestFocusTypingAndKeys:
    def test_typing_goes_to_focused_field(self, desk):
        desk.move_to((100, 150))
        desk.click()
        desk.type_text("hello")
        desk.type_text(" world")
        assert desk.text_buffers["field"] == "hello world"

    def test_typing_without_focus_is_logged_but_lost(self, desk):
        desk.type_text("into the void")
        assert desk.text_buffers == {}
        assert desk.event_log[-1].startswith("type(-")

    def test_return_fires_submit_effect_on_focused_field(self, desk):
        desk.move_to((100, 150))
        desk.click()
        desk.press_chord(["Return"])
        assert desk.scene.counters["hits"] == 1
        desk.press_chord(["ctrl", "s"])
        assert desk.scene.counters["hits"] == 1  # only Return submits

    def test_click_on_plain_button_clears_focus(self, desk):
        desk.move_to((100, 150))
        desk.click()
        assert desk.focus == "field"
        desk.move_to((100, 80))
        desk.click()
        assert desk.focus is None


class TestDeterminismAndRendering:
    def test_event_log_grows_monotonically(self, desk):
        desk.move_to((100, 80))
        desk.click()
        desk.drag_to((50, 50), duration=0.5)
        assert desk.event_log == [
            "move(100,80)",
            "left_click(over)",
            "drag(100,80->50,50)",
        ]

    def test_identical_sequences_identical_logs_and_frames(self):
        def run() -> tuple[list[str], bytes]:
            desk = SimulatedDesktop(parse_scene(SCENE))
            desk.move_to((100, 150))
            desk.click()
            desk.type_text("abc")
            desk.press_chord(["Return"])
            return desk.event_log, desk.capture_frame().tobytes()

        log_a, frame_a = run()
        log_b, frame_b = run()
        assert log_a == log_b
        assert frame_a == frame_b

    def test_render_is_pure_function_of_state(self, desk):
        a = desk.capture_frame()
        b = desk.capture_frame()
        assert np.array_equal(a, b)

    def test_counter_changes_change_pixels(self, desk):
        before = desk.capture_frame()
        desk.move_to((100, 80))
        desk.click()  # hits 0 -> 1, badge label re-renders
        after = desk.capture_frame()
        assert not np.array_equal(before, after)

    def test_typed_text_changes_pixels(self, desk):
        before = desk.capture_frame()
        desk.move_to((100, 150))
        desk.click()
        desk.type_text("Q")
        after = desk.capture_frame()
        assert not np.array_equal(before, after)

    def test_cursor_is_not_drawn(self, desk):
        before = desk.capture_frame()
        desk.move_to((200, 20))
        after = desk.capture_frame()
        assert np.array_equal(before, after)

    def test_frame_shape_matches_resolution(self, desk):
        frame = desk.capture_frame()
        assert frame.shape == (200, 320, 3)
        assert frame.dtype == np.uint8


class TestCursorContract:
    def test_cursor_query_returns_moved_point_exactly(self, desk):
        for p in [(0, 0), (319, 199), (100, 42)]:
            desk.move_to(p)
            assert desk.cursor_position() == p

    def test_move_outside_display_rejected(self, desk):
        with pytest.raises(BackendError):
            desk.move_to((320, 10))
        with pytest.raises(BackendError):
            desk.drag_to((10, 200), duration=0.1)
