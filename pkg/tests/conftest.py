from __future__ import annotations

import random

import pytest

from deskagent.transcript.types import ImagePart, TextPart, ToolResult

# Characters that stress the escaping and tag scanning paths.
NASTY_TEXT_POOL = [
    "plain words",
    "",
    "a < b && c > d",
    "&amp; already escaped?",
    "line one\nline two\n",
    "tabs\tand\rcarriage",
    'quotes " inside',
    "unicode: héllo ☃",
    "angle soup <<<>>>",
    "</text> forged closer",
    "</result> another",
    "json-ish {\"a\": [1, 2]}",
]


def random_result(rng: random.Random, call_id: str) -> ToolResult:
    status = rng.choice(["ok", "ok", "ok", "error"])
    parts = []
    for _ in range(rng.randint(0, 3)):
        if rng.random() < 0.7:
            parts.append(TextPart(rng.choice(NASTY_TEXT_POOL)))
        else:
            parts.append(ImagePart(f"shot_{rng.randint(0, 99)}"))
    error = None
    if status == "error":
        error = rng.choice([t for t in NASTY_TEXT_POOL if t])
    return ToolResult(
        call_id=call_id, status=status, content=tuple(parts), error_message=error
    )


def random_result_list(rng: random.Random) -> list[ToolResult]:
    return [random_result(rng, f"call_{i}") for i in range(rng.randint(0, 4))]


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)
