"""The three built-in tool contracts: computer, str_replace_editor, bash.

Flat schemas are kept exactly as published (property names, kinds, enum
members, required lists, description text). Requirements that the schema
cannot express ("Required only by `action=mouse_move`") are attached as named
conditional rules so the flat schema stays verbatim while the prose is still
enforced.
"""

from __future__ import annotations

from deskagent.transcript.types import (
    PropertySpec,
    RequiredUnless,
    RequiresWhen,
    ToolDefinition,
)

COMPUTER_ACTIONS = (
    "key",
    "type",
    "mouse_move",
    "left_click",
    "left_click_drag",
    "right_click",
    "middle_click",
    "double_click",
    "screenshot",
    "cursor_position",
)

POINTER_ACTIONS = ("mouse_move", "left_click_drag")
TEXT_ACTIONS = ("type", "key")

_ACTION_DESCRIPTION = """The action to perform. The available actions are:
* `key`: Press a key or key-combination on the keyboard.
  - This supports xdotool's `key` syntax.
  - Examples: "a", "Return", "alt+Tab", "ctrl+s", "Up", "KP_0" (for the numpad 0 key).
* `type`: Type a string of text on the keyboard.
* `cursor_position`: Get the current (x, y) pixel coordinate of the cursor on the screen.
* `mouse_move`: Move the cursor to a specified (x, y) pixel coordinate on the screen.
* `left_click`: Click the left mouse button.
* `left_click_drag`: Click and drag the cursor to a specified (x, y) pixel coordinate on the screen.
* `right_click`: Click the right mouse button.
* `middle_click`: Click the middle mouse button.
* `double_click`: Double-click the left mouse button.
* `screenshot`: Take a screenshot of the screen."""

COMPUTER_TOOL = ToolDefinition(
    name="computer",
    description=(
        "Use a mouse and keyboard to interact with a computer, and take "
        "screenshots."
    ),
    properties=(
        PropertySpec(
            name="action",
            kind="string",
            description=_ACTION_DESCRIPTION,
            enum_values=COMPUTER_ACTIONS,
        ),
        PropertySpec(
            name="coordinate",
            kind="array",
            description=(
                "(x, y): The x (pixels from the left edge) and y (pixels from "
                "the top edge) coordinates to move the mouse to. Required only "
                "by `action=mouse_move` and `action=left_click_drag`."
            ),
        ),
        PropertySpec(
            name="text",
            kind="string",
            description="Required only by `action=type` and `action=key`.",
        ),
    ),
    required=("action",),
    rules=(
        RequiresWhen(
            name="coordinate required by pointer actions",
            trigger="action",
            trigger_values=POINTER_ACTIONS,
            requires=("coordinate",),
        ),
        RequiresWhen(
            name="coordinate only accepted by pointer actions",
            trigger="action",
            trigger_values=tuple(
                a for a in COMPUTER_ACTIONS if a not in POINTER_ACTIONS
            ),
            forbids=("coordinate",),
        ),
        RequiresWhen(
            name="text required by keyboard actions",
            trigger="action",
            trigger_values=TEXT_ACTIONS,
            requires=("text",),
        ),
        RequiresWhen(
            name="text only accepted by keyboard actions",
            trigger="action",
            trigger_values=tuple(a for a in COMPUTER_ACTIONS if a not in TEXT_ACTIONS),
            forbids=("text",),
        ),
    ),
)

EDITOR_COMMANDS = ("view", "create", "str_replace", "insert", "undo_edit")

EDITOR_TOOL = ToolDefinition(
    name="str_replace_editor",
    description="Custom editing tool for viewing, creating and editing files.",
    properties=(
        PropertySpec(
            name="command",
            kind="string",
            description=(
                "The commands to run. Allowed options are: `view`, `create`, "
                "`str_replace`, `insert`, `undo_edit`."
            ),
            enum_values=EDITOR_COMMANDS,
        ),
        PropertySpec(
            name="file_text",
            kind="string",
            description=(
                "Required parameter of `create` command, with the content of "
                "the file to be created."
            ),
        ),
        PropertySpec(
            name="insert_line",
            kind="integer",
            description=(
                "Required parameter of `insert` command. The `new_str` will be "
                "inserted AFTER the line `insert_line` of `path`."
            ),
        ),
        PropertySpec(
            name="new_str",
            kind="string",
            description=(
                "Optional parameter of `str_replace` command containing the new "
                "string (if not given, no string will be added). Required "
                "parameter of `insert` command containing the string to insert."
            ),
        ),
        PropertySpec(
            name="old_str",
            kind="string",
            description=(
                "Required parameter of `str_replace` command containing the "
                "string in `path` to replace."
            ),
        ),
        PropertySpec(
            name="path",
            kind="string",
            description=(
                "Absolute path to file or directory, e.g. `/repo/file.py` or "
                "`/repo`."
            ),
        ),
        PropertySpec(
            name="view_range",
            kind="array-of-integer",
            description=(
                "Optional parameter of `view` command when `path` points to a "
                "file. If none is given, the full file is shown. If provided, "
                "the file will be shown in the indicated line number range, "
                "e.g. [11, 12] will show lines 11 and 12. Indexing at 1 to "
                "start. Setting `[start_line, -1]` shows all lines from "
                "`start_line` to the end of the file."
            ),
        ),
    ),
    required=("command", "path"),
    rules=(
        RequiresWhen(
            name="create requires file_text",
            trigger="command",
            trigger_values=("create",),
            requires=("file_text",),
        ),
        RequiresWhen(
            name="str_replace requires old_str",
            trigger="command",
            trigger_values=("str_replace",),
            requires=("old_str",),
        ),
        RequiresWhen(
            name="insert requires insert_line and new_str",
            trigger="command",
            trigger_values=("insert",),
            requires=("insert_line", "new_str"),
        ),
    ),
)

BASH_TOOL = ToolDefinition(
    name="bash",
    description="Run commands in a bash shell.",
    properties=(
        PropertySpec(
            name="command",
            kind="string",
            description=(
                "The bash command to run. Required unless the tool is being "
                "restarted."
            ),
        ),
        PropertySpec(
            name="restart",
            kind="boolean",
            description=(
                "Specifying true will restart this tool. Otherwise, leave this "
                "unspecified."
            ),
        ),
    ),
    required=(),
    rules=(
        RequiredUnless(
            name="command required unless restarting",
            required="command",
            unless="restart",
        ),
    ),
)


def builtin_tools() -> dict[str, ToolDefinition]:
    """The default tool registry contents, keyed by tool name."""
    return {
        COMPUTER_TOOL.name: COMPUTER_TOOL,
        EDITOR_TOOL.name: EDITOR_TOOL,
        BASH_TOOL.name: BASH_TOOL,
    }
