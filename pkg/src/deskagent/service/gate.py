"""Blocking approval gate: at most one pending invocation per session."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable

from deskagent.service.policy import RiskPolicy
from deskagent.transcript.types import ToolInvocation


@dataclass(frozen=True)
class PendingApproval:
    invocation: ToolInvocation
    risk_reason: str


class NoPendingApproval(ValueError):
    pass


class ApprovalGate:
    """Gate hook for the episode loop, driven by a risk policy.

    ``review`` blocks the episode thread while an operator decides;
    ``resolve`` is called from the control plane. Aborting releases any
    waiter with a deny.
    """

    def __init__(
        self,
        policy: RiskPolicy,
        on_pending: Callable[[PendingApproval], None] | None = None,
        on_resolved: Callable[[PendingApproval, bool, str | None], None] | None = None,
    ):
        self.policy = policy
        self._on_pending = on_pending or (lambda pending: None)
        self._on_resolved = on_resolved or (lambda pending, ok, reason: None)
        self._cond = threading.Condition()
        self._pending: PendingApproval | None = None
        self._decision: tuple[bool, str | None] | None = None
        self._aborted = False

    @property
    def pending(self) -> PendingApproval | None:
        with self._cond:
            return self._pending

    def review(self, invocation: ToolInvocation) -> tuple[bool, str | None]:
        decision, rule_name = self.policy.decide(invocation)
        if decision == "allow":
            return True, None
        pending = PendingApproval(invocation, rule_name or "gated by policy")
        with self._cond:
            if self._aborted:
                return False, "session aborted"
            self._pending = pending
            self._decision = None
        self._on_pending(pending)
        with self._cond:
            while self._decision is None and not self._aborted:
                self._cond.wait()
            verdict = self._decision if self._decision is not None else (False, "session aborted")
            self._pending = None
            self._decision = None
        self._on_resolved(pending, verdict[0], verdict[1])
        return verdict

    def resolve(self, approve: bool, reason: str | None = None) -> None:
        with self._cond:
            if self._pending is None:
                raise NoPendingApproval("no invocation is awaiting approval")
            self._decision = (approve, reason)
            self._cond.notify_all()

    def abort(self) -> None:
        with self._cond:
            self._aborted = True
            self._cond.notify_all()
