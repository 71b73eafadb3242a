"""Schema validation of invocations against tool definitions.

Violations are data, not exceptions. Wire values arrive as strings for scalar
parameters ("string and scalar parameters should be passed as is"), so kind
checks accept either the native type or a string that reads as that kind;
``coerce_arguments`` turns a validated argument map into native values.
"""

from __future__ import annotations

from typing import Any

from deskagent.transcript.types import (
    PropertySpec,
    ToolDefinition,
    ToolInvocation,
    Violation,
)


def _reads_as_int(value: Any) -> bool:
    if isinstance(value, bool):
        return False
    if isinstance(value, int):
        return True
    if isinstance(value, str):
        try:
            int(value.strip())
            return True
        except ValueError:
            return False
    return False


def _reads_as_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return True
    return isinstance(value, str) and value.strip().lower() in ("true", "false")


def _kind_ok(spec: PropertySpec, value: Any) -> bool:
    if spec.kind == "string":
        return isinstance(value, str)
    if spec.kind == "integer":
        return _reads_as_int(value)
    if spec.kind == "boolean":
        return _reads_as_bool(value)
    if spec.kind == "array":
        return isinstance(value, (list, tuple))
    if spec.kind == "array-of-integer":
        return isinstance(value, (list, tuple)) and all(
            _reads_as_int(v) for v in value
        )
    return False  # pragma: no cover - kinds are closed at construction


def validate_invocation(
    definition: ToolDefinition, invocation: ToolInvocation
) -> list[Violation]:
    """Return all violations of the definition; empty list means valid."""
    if invocation.tool_name != definition.name:
        return [
            Violation(
                "wrong_tool",
                None,
                f"invocation names {invocation.tool_name!r}, "
                f"definition is {definition.name!r}",
            )
        ]
    violations: list[Violation] = []
    args = invocation.arguments
    for req in definition.required:
        if req not in args:
            violations.append(
                Violation(
                    "missing_required", req, f"missing required property {req!r}"
                )
            )
    for name, value in args.items():
        spec = definition.property_named(name)
        if spec is None:
            violations.append(
                Violation("unknown_property", name, f"unknown property {name!r}")
            )
            continue
        if not _kind_ok(spec, value):
            violations.append(
                Violation(
                    "kind_mismatch",
                    name,
                    f"property {name!r} expects {spec.kind}, got {value!r}",
                )
            )
            continue
        if spec.enum_values is not None and value not in spec.enum_values:
            violations.append(
                Violation(
                    "enum",
                    name,
                    f"property {name!r}: {value!r} is not one of "
                    f"{list(spec.enum_values)}",
                )
            )
    for rule in definition.rules:
        violations.extend(rule.check(args))
    return violations


def coerce_arguments(
    definition: ToolDefinition, invocation: ToolInvocation
) -> dict[str, Any]:
    """Native-typed copy of a validated argument map.

    Integer/boolean strings become int/bool; integer array elements become
    ints; everything else passes through unchanged.
    """
    out: dict[str, Any] = {}
    for name, value in invocation.arguments.items():
        spec = definition.property_named(name)
        if spec is None:
            out[name] = value
        elif spec.kind == "integer" and isinstance(value, str):
            out[name] = int(value.strip())
        elif spec.kind == "boolean" and isinstance(value, str):
            out[name] = value.strip().lower() == "true"
        elif spec.kind == "array-of-integer":
            out[name] = [int(v.strip()) if isinstance(v, str) else int(v) for v in value]
        else:
            out[name] = value
    return out
