"""The 10-action GUI vocabulary, its call-text syntax, and key chords.

Actions are written ``action_type(arguments)``; points are model-space pixels
measured from the left and top edges. Key chords use xdotool-style syntax:
"+"-separated symbols from a fixed table, case-sensitive for named keys.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass

from deskagent.errors import ActionArgumentError, BoundsError, UnknownAction, UnknownKeySymbol
from deskagent.screen import DisplayGeometry
from deskagent.transcript.builtin import COMPUTER_ACTIONS, POINTER_ACTIONS, TEXT_ACTIONS

Point = tuple[int, int]

DEFAULT_DRAG_SECONDS = 0.5


@dataclass(frozen=True)
class GuiAction:
    """One validated GUI primitive."""

    name: str
    point: Point | None = None
    text: str | None = None
    duration: float | None = None

    def __post_init__(self) -> None:
        if self.name not in COMPUTER_ACTIONS:
            raise UnknownAction(f"unknown action {self.name!r}")
        needs_point = self.name in POINTER_ACTIONS
        if needs_point and self.point is None:
            raise ActionArgumentError(f"{self.name} requires a coordinate")
        if not needs_point and self.point is not None:
            raise ActionArgumentError(f"{self.name} does not take a coordinate")
        needs_text = self.name in TEXT_ACTIONS
        if needs_text and self.text is None:
            raise ActionArgumentError(f"{self.name} requires text")
        if not needs_text and self.text is not None:
            raise ActionArgumentError(f"{self.name} does not take text")
        if self.duration is not None:
            if self.name != "left_click_drag":
                raise ActionArgumentError(f"{self.name} does not take a duration")
            if self.duration <= 0:
                raise ActionArgumentError("duration must be positive")
        if self.point is not None:
            x, y = self.point
            if not isinstance(x, int) or not isinstance(y, int) or isinstance(x, bool) or isinstance(y, bool):
                raise ActionArgumentError(f"coordinates must be integers, got {self.point!r}")
            if x < 0 or y < 0:
                raise ActionArgumentError(f"coordinates must be >= 0, got {self.point!r}")

    def check_bounds(self, geom: DisplayGeometry) -> None:
        """Raise BoundsError when the point lies outside the model resolution."""
        if self.point is None:
            return
        w, h = geom.model_resolution
        for axis, value, limit in (("x", self.point[0], w), ("y", self.point[1], h)):
            if value >= limit:
                raise BoundsError(axis, value, limit)


def action_from_arguments(arguments: dict) -> GuiAction:
    """Build a GuiAction from coerced computer-tool arguments."""
    name = arguments.get("action")
    if not isinstance(name, str) or name not in COMPUTER_ACTIONS:
        raise UnknownAction(f"unknown action {name!r}")
    point = None
    if "coordinate" in arguments:
        coord = arguments["coordinate"]
        if not isinstance(coord, (list, tuple)) or len(coord) != 2:
            raise ActionArgumentError(f"coordinate must be [x, y], got {coord!r}")
        try:
            point = (int(coord[0]), int(coord[1]))
        except (TypeError, ValueError) as exc:
            raise ActionArgumentError(f"coordinate must be [x, y] integers: {coord!r}") from exc
    return GuiAction(name=name, point=point, text=arguments.get("text"))


def _constant(node: ast.expr) -> object:
    if not isinstance(node, ast.Constant):
        raise ActionArgumentError("arguments must be literal constants")
    return node.value


def parse_action_text(text: str) -> GuiAction:
    """Parse one ``action_type(arguments)`` call, e.g. ``mouse_move(100, 150)``.

    Named arguments are supported where the action accepts them
    (``left_click_drag(100, 200, duration=2)``).
    """
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ActionArgumentError(f"unparseable action text: {text!r}") from exc
    call = tree.body
    if not isinstance(call, ast.Call) or not isinstance(call.func, ast.Name):
        raise ActionArgumentError(f"expected action_type(arguments), got {text!r}")
    name = call.func.id
    if name not in COMPUTER_ACTIONS:
        raise UnknownAction(f"unknown action {name!r}")
    args = [_constant(a) for a in call.args]
    kwargs = {}
    for kw in call.keywords:
        if kw.arg is None:
            raise ActionArgumentError("** arguments are not supported")
        kwargs[kw.arg] = _constant(kw.value)

    def ints(n: int) -> tuple[int, ...]:
        if len(args) != n or not all(isinstance(a, int) and not isinstance(a, bool) for a in args):
            raise ActionArgumentError(f"{name} expects {n} integer argument(s)")
        return tuple(args)  # type: ignore[return-value]

    if name == "mouse_move":
        if kwargs:
            raise ActionArgumentError("mouse_move takes no named arguments")
        x, y = ints(2)
        return GuiAction("mouse_move", point=(x, y))
    if name == "left_click_drag":
        duration = kwargs.pop("duration", None)
        if kwargs:
            raise ActionArgumentError(f"unexpected named arguments {sorted(kwargs)}")
        x, y = ints(2)
        if duration is not None and not isinstance(duration, (int, float)):
            raise ActionArgumentError("duration must be a number")
        return GuiAction(
            "left_click_drag",
            point=(x, y),
            duration=float(duration) if duration is not None else None,
        )
    if name in TEXT_ACTIONS:
        if kwargs or len(args) != 1 or not isinstance(args[0], str):
            raise ActionArgumentError(f"{name} expects one string argument")
        return GuiAction(name, text=args[0])
    # bare actions: clicks, screenshot, cursor_position
    if args or kwargs:
        raise ActionArgumentError(f"{name} takes no arguments")
    return GuiAction(name)


MODIFIER_SYMBOLS = frozenset(
    {
        "ctrl", "control", "alt", "shift", "super", "meta", "win", "cmd",
        "Control_L", "Control_R", "Alt_L", "Alt_R", "Shift_L", "Shift_R",
        "Super_L", "Super_R",
    }
)

_NAMED_KEYS = {
    "Return", "Tab", "space", "BackSpace", "Delete", "Escape", "Insert",
    "Home", "End", "Prior", "Next", "Page_Up", "Page_Down",
    "Up", "Down", "Left", "Right",
    "Caps_Lock", "Num_Lock", "Scroll_Lock", "Print", "Pause", "Menu",
    "minus", "plus", "equal", "underscore", "comma", "period", "slash",
    "backslash", "semicolon", "apostrophe", "grave", "asciitilde",
    "bracketleft", "bracketright", "braceleft", "braceright",
    "parenleft", "parenright", "less", "greater", "bar", "question",
    "exclam", "at", "numbersign", "dollar", "percent", "asciicircum",
    "ampersand", "asterisk", "quotedbl", "colon",
}
_NAMED_KEYS |= {f"F{i}" for i in range(1, 25)}
_NAMED_KEYS |= {f"KP_{i}" for i in range(10)}
_NAMED_KEYS |= {
    "KP_Enter", "KP_Add", "KP_Subtract", "KP_Multiply", "KP_Divide",
    "KP_Decimal", "KP_Home", "KP_End",
}

KEY_SYMBOLS = frozenset(_NAMED_KEYS) | MODIFIER_SYMBOLS


def parse_key_chord(chord: str) -> list[str]:
    """Split an xdotool-style chord on "+", trimming whitespace per token.

    Each token must be a known modifier, a named key symbol, or a single
    printable character. Tokens come back exactly as given (minus the
    surrounding whitespace), so "ctrl + s" and "ctrl+s" parse alike.
    """
    if not chord or not chord.strip():
        raise UnknownKeySymbol("")
    tokens = [t.strip() for t in chord.split("+")]
    for token in tokens:
        if token in KEY_SYMBOLS:
            continue
        if len(token) == 1 and token.isprintable() and token != " ":
            continue
        raise UnknownKeySymbol(token)
    return tokens
