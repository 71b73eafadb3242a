"""Session lifecycle records and the outcome/error annotation vocabulary.

Outcomes are binary (Success/Failed). Failed outcomes may carry one error
category: PE (planning error: wrong plan from the task query), AE (action
error: correct plan, wrong execution), CE (critic error: wrong self-assessment
of state or completion).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

SESSION_STATUSES = (
    "running",
    "awaiting_approval",
    "awaiting_user",
    "completed",
    "aborted",
    "error",
)
TERMINAL_STATUSES = ("awaiting_user", "completed", "aborted", "error")
OUTCOMES = ("Success", "Failed")
ERROR_CATEGORIES = ("PE", "AE", "CE")


class AnnotationError(ValueError):
    """Annotation that violates the state machine."""


@dataclass(frozen=True)
class SessionRecord:
    session_id: str
    instruction: str
    status: str = "running"
    domain_tag: str | None = None
    outcome: str | None = None
    error_category: str | None = None
    note: str | None = None
    detail: str | None = None  # e.g. why an error status happened
    created_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )

    def __post_init__(self) -> None:
        if self.status not in SESSION_STATUSES:
            raise ValueError(f"unknown session status {self.status!r}")
        if self.outcome is not None:
            if self.outcome not in OUTCOMES:
                raise ValueError(f"unknown outcome {self.outcome!r}")
            if self.status not in TERMINAL_STATUSES:
                raise AnnotationError("outcome settable only on a terminal session")
        if self.error_category is not None:
            if self.error_category not in ERROR_CATEGORIES:
                raise ValueError(f"unknown error category {self.error_category!r}")
            if self.outcome != "Failed":
                raise AnnotationError("error_category requires outcome=Failed")

    @property
    def terminal(self) -> bool:
        return self.status in TERMINAL_STATUSES

    def with_status(self, status: str, detail: str | None = None) -> "SessionRecord":
        if self.terminal and status != self.status:
            raise AnnotationError(
                f"no transitions out of terminal status {self.status!r}"
            )
        return replace(self, status=status, detail=detail if detail else self.detail)

    def with_annotation(
        self, outcome: str, error_category: str | None, note: str | None
    ) -> "SessionRecord":
        if not self.terminal:
            raise AnnotationError("session is not terminal; cannot annotate")
        return replace(
            self, outcome=outcome, error_category=error_category, note=note
        )

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "instruction": self.instruction,
            "domain_tag": self.domain_tag,
            "status": self.status,
            "outcome": self.outcome,
            "error_category": self.error_category,
            "note": self.note,
            "detail": self.detail,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "SessionRecord":
        return cls(
            session_id=payload["session_id"],
            instruction=payload["instruction"],
            status=payload.get("status", "error"),
            domain_tag=payload.get("domain_tag"),
            outcome=payload.get("outcome"),
            error_category=payload.get("error_category"),
            note=payload.get("note"),
            detail=payload.get("detail"),
            created_at=payload.get("created_at", ""),
        )


def episode_status_to_session(final_status: str) -> tuple[str, str | None]:
    """Map an episode's final status onto the session vocabulary."""
    if final_status in ("completed", "aborted", "awaiting_user"):
        return final_status, None
    if final_status == "step_limit":
        return "error", "step limit reached"
    return "error", None
