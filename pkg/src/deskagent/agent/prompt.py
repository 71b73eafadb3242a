"""System prompt composition.

The shipped default template (data/system_prompt.md) writes environment
variables in full capital letters enclosed in square brackets, optionally with
an example after a comma: ``[SCREEN_RESOLUTION, e.g., 1024x768]``. Every such
placeholder is substituted from the config map (keys are the lowercased
names); unfilled placeholders are an error listing all of them.
"""

from __future__ import annotations

import re
from datetime import date, datetime
from importlib import resources

from deskagent.errors import MissingPlaceholder

_PLACEHOLDER_RE = re.compile(r"\[([A-Z][A-Z0-9_]*)(?:,[^\]]*)?\]")


def default_template() -> str:
    return (
        resources.files("deskagent").joinpath("data/system_prompt.md").read_text("utf-8")
    )


def find_placeholders(template: str) -> list[str]:
    """Placeholder names in order of first appearance."""
    seen: list[str] = []
    for match in _PLACEHOLDER_RE.finditer(template):
        if match.group(1) not in seen:
            seen.append(match.group(1))
    return seen


def compose_system_prompt(
    template: str, config: dict[str, str], extra_notes: str | None = None
) -> str:
    """Fill every bracketed placeholder from config; append optional notes."""
    missing = [
        name for name in find_placeholders(template) if name.lower() not in config
    ]
    if missing:
        raise MissingPlaceholder(missing)

    def fill(match: re.Match) -> str:
        return str(config[match.group(1).lower()])

    prompt = _PLACEHOLDER_RE.sub(fill, template)
    if extra_notes:
        prompt = prompt.rstrip("\n") + "\n\n" + extra_notes.strip() + "\n"
    return prompt


def format_datetime(moment: datetime | date) -> str:
    """Render like "Wednesday, October 23, 2024"."""
    return f"{moment:%A}, {moment:%B} {moment.day}, {moment.year}"
