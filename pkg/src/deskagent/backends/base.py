"""Backend interface: raw pointer/keyboard injection plus frame capture.

All backend coordinates are physical pixels. A backend instance is single
owner: callers serialize actions onto it (the computer tool and episode loop
already do).
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

Point = tuple[int, int]


@dataclass(frozen=True)
class Capabilities:
    can_capture: bool
    can_inject: bool


class InputBackend(ABC):
    @property
    @abstractmethod
    def capabilities(self) -> Capabilities: ...

    @property
    @abstractmethod
    def physical_resolution(self) -> tuple[int, int]: ...

    @abstractmethod
    def move_to(self, p: Point) -> None: ...

    @abstractmethod
    def click(self, button: str = "left", count: int = 1) -> None:
        """Click at the current cursor position."""

    @abstractmethod
    def drag_to(self, p: Point, duration: float) -> None:
        """Press, drag from the current cursor position to p, release."""

    @abstractmethod
    def press_chord(self, symbols: list[str]) -> None: ...

    @abstractmethod
    def type_text(self, text: str) -> None: ...

    @abstractmethod
    def cursor_position(self) -> Point: ...

    @abstractmethod
    def capture_frame(self) -> np.ndarray:
        """Current frame as (H, W, 3) uint8, H/W = physical resolution."""
