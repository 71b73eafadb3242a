"""Risk policy: which invocations run freely and which wait for a human.

Rules are ordered; the first match wins; an empty policy allows everything.
The default policy gates every bash command, the conservative choice for a
tool that can touch anything on the host. Editor containment is enforced by
the editor's own path jail, not here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from deskagent.transcript.types import ToolInvocation


@dataclass(frozen=True)
class RiskRule:
    name: str
    decision: str  # allow | gate
    tool: str | None = None
    argument_equals: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if self.decision not in ("allow", "gate"):
            raise ValueError(f"rule {self.name!r}: decision must be allow or gate")

    def matches(self, invocation: ToolInvocation) -> bool:
        if self.tool is not None and invocation.tool_name != self.tool:
            return False
        for key, expected in self.argument_equals:
            if str(invocation.arguments.get(key)) != expected:
                return False
        return True


@dataclass(frozen=True)
class RiskPolicy:
    rules: tuple[RiskRule, ...] = ()

    def decide(self, invocation: ToolInvocation) -> tuple[str, str | None]:
        """(decision, matching rule name); allow when nothing matches."""
        for rule in self.rules:
            if rule.matches(invocation):
                return rule.decision, rule.name
        return "allow", None

    @classmethod
    def default(cls) -> "RiskPolicy":
        return cls(
            rules=(RiskRule(name="all bash commands gated", decision="gate", tool="bash"),)
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "RiskPolicy":
        payload = json.loads(Path(path).read_text("utf-8"))
        rules = []
        for item in payload.get("rules", ()):
            rules.append(
                RiskRule(
                    name=item["name"],
                    decision=item["decision"],
                    tool=item.get("tool"),
                    argument_equals=tuple(
                        (k, str(v)) for k, v in item.get("argument_equals", {}).items()
                    ),
                )
            )
        return cls(rules=tuple(rules))
