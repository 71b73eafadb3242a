from __future__ import annotations

import random

import numpy as np
import pytest

from deskagent.agent.history import (
    HistoryContext,
    Turn,
    apply_history_cap,
    update_history,
)
from deskagent.errors import OrderError
from deskagent.tools.computer import ScreenshotImage
from deskagent.transcript.types import (
    FreeText,
    ImagePart,
    ResultGroup,
    TextPart,
    ToolResult,
)


def shot(index: int) -> ScreenshotImage:
    return ScreenshotImage(
        width=2, height=2,
        pixels=np.zeros((2, 2, 3), dtype=np.uint8),
        captured_at_ms=index, sequence_index=index,
    )


def tool_turn(index: int) -> Turn:
    return Turn(
        "tool",
        ResultGroup(
            (ToolResult.ok(f"call_{index}", images=(f"shot_{index}",)),)
        ),
    )


class TestUpdate:
    def test_empty_history_plus_first_shot(self):
        history = update_history(HistoryContext(), shot(0), tool_turn(0))
        assert history.screenshot_indices == (0,)
        assert len(history.turns) == 1

    def test_accumulation_is_append_under_monotone_indices(self):
        history = HistoryContext()
        for i in range(3):
            history = update_history(history, shot(i), tool_turn(i))
        assert history.screenshot_indices == (0, 1, 2)

    def test_turn_without_shot_keeps_screenshots(self):
        history = update_history(HistoryContext(), shot(0), tool_turn(0))
        history = update_history(history, None, Turn("model", FreeText("thinking")))
        assert history.screenshot_indices == (0,)
        assert len(history.turns) == 2

    def test_out_of_order_shot_raises(self):
        history = update_history(HistoryContext(), shot(5), tool_turn(5))
        with pytest.raises(OrderError):
            update_history(history, shot(5), tool_turn(5))
        with pytest.raises(OrderError):
            update_history(history, shot(4), tool_turn(4))

    def test_uncapped_law_random_episodes(self):
        rng = random.Random(7)
        for _ in range(50):
            steps = rng.randint(0, 50)
            history = HistoryContext(cap=None)
            for i in range(steps):
                history = update_history(history, shot(i), tool_turn(i))
                history = apply_history_cap(history)
            assert history.screenshot_indices == tuple(range(steps))


class TestCap:
    def build(self, n: int, cap: int | None = None) -> HistoryContext:
        history = HistoryContext(cap=cap)
        for i in range(n):
            history = update_history(history, shot(i), tool_turn(i))
        return history

    def test_cap_larger_than_history_is_identity(self):
        history = self.build(3)
        capped = apply_history_cap(history, 10)
        assert capped.screenshot_indices == (0, 1, 2)
        assert capped.turns == history.turns

    def test_cap_keeps_most_recent(self):
        # sort-and-slice oracle
        indices = list(range(10))
        expected = tuple(sorted(indices)[-3:])
        capped = apply_history_cap(self.build(10), 3)
        assert capped.screenshot_indices == expected == (7, 8, 9)

    def test_cap_one_keeps_only_latest_through_updates(self):
        history = HistoryContext(cap=1)
        for i in range(5):
            history = update_history(history, shot(i), tool_turn(i))
            history = apply_history_cap(history)
            assert history.screenshot_indices == (i,)

    def test_cap_is_idempotent(self):
        once = apply_history_cap(self.build(10), 4)
        twice = apply_history_cap(once, 4)
        assert once == twice

    def test_evicted_images_become_text_stubs_in_turns(self):
        capped = apply_history_cap(self.build(5), 2)
        stub_turn = capped.turns[0]
        [result] = stub_turn.segment.results
        [part] = result.content
        assert isinstance(part, TextPart)
        assert "shot_0" in part.text and "evicted" in part.text
        kept_turn = capped.turns[-1]
        [kept_result] = kept_turn.segment.results
        assert isinstance(kept_result.content[0], ImagePart)

    def test_all_text_turns_retained(self):
        history = self.build(6)
        history = update_history(history, None, Turn("model", FreeText("note")))
        capped = apply_history_cap(history, 2)
        assert len(capped.turns) == len(history.turns)

    def test_cap_below_one_rejected(self):
        with pytest.raises(ValueError):
            apply_history_cap(self.build(3), 0)
