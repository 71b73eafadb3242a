"""Display geometry and coordinate scaling between model and physical space.

Model space is the pixel grid the model sees (its screenshots), physical space
is the host display. Both mappings round half away from zero and clamp into
the target resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from deskagent.errors import BoundsError

# Suggested model resolutions by platform.
WINDOWS_RESOLUTION = (1366, 768)
MACOS_RESOLUTION = (1344, 756)

Point = tuple[int, int]


@dataclass(frozen=True)
class DisplayGeometry:
    """Model and physical resolutions for one display."""

    model_resolution: tuple[int, int]
    physical_resolution: tuple[int, int]
    display_number: int = 0

    def __post_init__(self) -> None:
        for label, (w, h) in (
            ("model", self.model_resolution),
            ("physical", self.physical_resolution),
        ):
            if w < 1 or h < 1:
                raise ValueError(f"{label} resolution must be >= 1x1, got {w}x{h}")

    @classmethod
    def identity(cls, resolution: tuple[int, int], display_number: int = 0) -> "DisplayGeometry":
        return cls(resolution, resolution, display_number)


def _round_half_away(x: float) -> int:
    # coordinates are non-negative, so half away from zero is floor(x + 0.5)
    return math.floor(x + 0.5)


def _check_bounds(p: Point, resolution: tuple[int, int]) -> None:
    for axis, value, limit in (("x", p[0], resolution[0]), ("y", p[1], resolution[1])):
        if not 0 <= value < limit:
            raise BoundsError(axis, value, limit)


def _scale(p: Point, src: tuple[int, int], dst: tuple[int, int]) -> Point:
    x = _round_half_away(p[0] * dst[0] / src[0])
    y = _round_half_away(p[1] * dst[1] / src[1])
    return (min(max(x, 0), dst[0] - 1), min(max(y, 0), dst[1] - 1))


def scale_to_physical(geom: DisplayGeometry, p: Point) -> Point:
    """Map a model-space point onto the physical display."""
    _check_bounds(p, geom.model_resolution)
    return _scale(p, geom.model_resolution, geom.physical_resolution)


def scale_to_model(geom: DisplayGeometry, p: Point) -> Point:
    """Map a physical-space point back into model space."""
    _check_bounds(p, geom.physical_resolution)
    return _scale(p, geom.physical_resolution, geom.model_resolution)


def parse_resolution(text: str) -> tuple[int, int]:
    """Parse "1366x768" into (1366, 768)."""
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"resolution must look like 1366x768, got {text!r}")
    w, h = int(parts[0]), int(parts[1])
    if w < 1 or h < 1:
        raise ValueError(f"resolution must be positive, got {text!r}")
    return (w, h)


def format_resolution(resolution: tuple[int, int]) -> str:
    return f"{resolution[0]}x{resolution[1]}"


def default_resolution(platform: str) -> tuple[int, int]:
    """Suggested model resolution for a sys.platform string."""
    if platform.startswith("darwin"):
        return MACOS_RESOLUTION
    return WINDOWS_RESOLUTION


def check_point_in_model(geom: DisplayGeometry, p: Point) -> None:
    _check_bounds(p, geom.model_resolution)


def round_half_away(x: float) -> int:
    return _round_half_away(x)
