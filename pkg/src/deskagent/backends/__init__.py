"""Input backends: where GUI actions land and frames come from."""

from deskagent.backends.base import Capabilities, InputBackend
from deskagent.backends.simulated import (
    Scene,
    SimulatedDesktop,
    Widget,
    load_scene,
    parse_scene,
    render_scene,
)
from deskagent.backends.live import LiveDesktop

__all__ = [
    "Capabilities",
    "InputBackend",
    "LiveDesktop",
    "Scene",
    "SimulatedDesktop",
    "Widget",
    "load_scene",
    "parse_scene",
    "render_scene",
]
