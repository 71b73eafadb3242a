"""Session control plane: lifecycle, approval gating, annotations, HTTP API."""

from deskagent.service.config import ServiceConfig, load_config
from deskagent.service.records import (
    ERROR_CATEGORIES,
    OUTCOMES,
    TERMINAL_STATUSES,
    SessionRecord,
)
from deskagent.service.policy import RiskPolicy, RiskRule
from deskagent.service.gate import ApprovalGate
from deskagent.service.manager import SessionManager, SessionNotFound, SessionStateError
from deskagent.service.http import create_app

__all__ = [
    "ApprovalGate",
    "ERROR_CATEGORIES",
    "OUTCOMES",
    "RiskPolicy",
    "RiskRule",
    "ServiceConfig",
    "SessionManager",
    "SessionNotFound",
    "SessionRecord",
    "SessionStateError",
    "TERMINAL_STATUSES",
    "create_app",
    "load_config",
]
