"""Millisecond clocks. Episodes take an injected clock so that simulated runs
can be bit-reproducible; live runs use the wall clock."""

from __future__ import annotations

import time
from typing import Callable

Clock = Callable[[], int]


def wall_clock() -> int:
    return int(time.time() * 1000)


def counter_clock(start: int = 0, step: int = 1) -> Clock:
    """Deterministic clock: start, start+step, ... per call."""
    state = {"t": start - step}

    def tick() -> int:
        state["t"] += step
        return state["t"]

    return tick
