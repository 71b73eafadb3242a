"""Visual history context: accumulated screenshots plus message turns.

Uncapped, the screenshot list after step t is exactly the union of everything
captured so far (indices are monotone, so set union degenerates to append).
A cap keeps the most recent N images; evicted images are replaced inside the
retained turns by a text stub, and text turns always survive.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from deskagent.errors import OrderError
from deskagent.tools.computer import ScreenshotImage
from deskagent.transcript.types import (
    ImagePart,
    ResultGroup,
    TextPart,
    ToolResult,
    TranscriptSegment,
)


@dataclass(frozen=True)
class Turn:
    role: str  # model | tool
    segment: TranscriptSegment


@dataclass(frozen=True)
class HistoryContext:
    turns: tuple[Turn, ...] = ()
    screenshots: tuple[ScreenshotImage, ...] = ()
    cap: int | None = None

    @property
    def screenshot_indices(self) -> tuple[int, ...]:
        return tuple(s.sequence_index for s in self.screenshots)


@dataclass(frozen=True)
class EvictionStub:
    """What replaces an evicted screenshot inside a retained turn."""

    ref: str

    def as_text(self) -> TextPart:
        return TextPart(f"[screenshot {self.ref} evicted from history]")


def update_history(
    history: HistoryContext,
    new_shot: ScreenshotImage | None,
    turn: Turn | None,
) -> HistoryContext:
    """Append a turn and fold a new screenshot into the retained set."""
    screenshots = history.screenshots
    if new_shot is not None:
        if screenshots and new_shot.sequence_index <= screenshots[-1].sequence_index:
            raise OrderError(
                f"screenshot {new_shot.sequence_index} arrived after "
                f"{screenshots[-1].sequence_index}"
            )
        screenshots = screenshots + (new_shot,)
    turns = history.turns + ((turn,) if turn is not None else ())
    return HistoryContext(turns=turns, screenshots=screenshots, cap=history.cap)


def _strip_evicted(segment: TranscriptSegment, evicted: set[str]) -> TranscriptSegment:
    if not isinstance(segment, ResultGroup):
        return segment
    changed = False
    results = []
    for result in segment.results:
        parts = []
        for part in result.content:
            if isinstance(part, ImagePart) and part.ref in evicted:
                parts.append(EvictionStub(part.ref).as_text())
                changed = True
            else:
                parts.append(part)
        results.append(
            ToolResult(
                call_id=result.call_id,
                status=result.status,
                content=tuple(parts),
                error_message=result.error_message,
            )
        )
    return ResultGroup(tuple(results)) if changed else segment


def apply_history_cap(history: HistoryContext, cap: int | None = None) -> HistoryContext:
    """Keep the most recent N screenshots; idempotent for a fixed N."""
    cap = cap if cap is not None else history.cap
    if cap is None or len(history.screenshots) <= cap:
        return replace(history, cap=cap)
    if cap < 1:
        raise ValueError("cap must be >= 1")
    kept = history.screenshots[-cap:]
    evicted = {s.ref for s in history.screenshots[:-cap]}
    turns = tuple(
        Turn(t.role, _strip_evicted(t.segment, evicted)) for t in history.turns
    )
    return HistoryContext(turns=turns, screenshots=kept, cap=cap)
