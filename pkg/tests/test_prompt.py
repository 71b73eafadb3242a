from __future__ import annotations

from datetime import date

import pytest

from deskagent.agent.prompt import (
    compose_system_prompt,
    default_template,
    find_placeholders,
    format_datetime,
)
from deskagent.errors import MissingPlaceholder


class TestPlaceholders:
    def test_bracketed_placeholder_with_example_is_replaced_whole(self):
        template = "The screen resolution is [SCREEN_RESOLUTION, e.g., 1024x768]."
        out = compose_system_prompt(template, {"screen_resolution": "1366x768"})
        assert out == "The screen resolution is 1366x768."

    def test_template_without_placeholders_is_unchanged(self):
        template = "no placeholders here; [not one] [n0r_this]"
        assert compose_system_prompt(template, {}) == template

    def test_datetime_placeholder(self):
        template = "The current date is [DATETIME, e.g., Wednesday, October 23, 2024]."
        stamp = format_datetime(date(2024, 10, 23))
        out = compose_system_prompt(template, {"datetime": stamp})
        assert out == "The current date is Wednesday, October 23, 2024."

    def test_missing_config_lists_all_unfilled_names(self):
        template = "[ALPHA] then [BETA, e.g., two] then [ALPHA]"
        with pytest.raises(MissingPlaceholder) as err:
            compose_system_prompt(template, {"alpha": "x"})
        assert err.value.names == ["BETA"]
        with pytest.raises(MissingPlaceholder) as err:
            compose_system_prompt(template, {})
        assert err.value.names == ["ALPHA", "BETA"]

    def test_find_placeholders_orders_by_first_appearance(self):
        assert find_placeholders("[B] [A] [B]") == ["B", "A"]

    def test_extra_notes_appended(self):
        out = compose_system_prompt("body [X]", {"x": "1"}, extra_notes="be careful")
        assert out == "body 1\n\nbe careful\n"


class TestDefaultTemplate:
    def test_fills_completely_with_the_two_documented_keys(self):
        template = default_template()
        names = find_placeholders(template)
        assert names == ["SCREEN_RESOLUTION", "DATETIME"]
        prompt = compose_system_prompt(
            template,
            {
                "screen_resolution": "1366x768",
                "datetime": format_datetime(date(2024, 10, 23)),
            },
        )
        assert "1366x768" in prompt
        assert "Wednesday, October 23, 2024" in prompt
        assert find_placeholders(prompt) == []

    def test_template_documents_the_protocol(self):
        template = default_template()
        assert "invoke one or more functions" in template
        assert "Lists and objects should be passed in JSON format" in template
        assert "was likely malformatted" in template
        assert "chain multiple function calls" in template


class TestDatetimeFormatting:
    @pytest.mark.parametrize(
        "day,expected",
        [
            (date(2024, 10, 23), "Wednesday, October 23, 2024"),
            (date(2025, 1, 1), "Wednesday, January 1, 2025"),
            (date(2024, 3, 9), "Saturday, March 9, 2024"),
        ],
    )
    def test_format(self, day, expected):
        assert format_datetime(day) == expected
