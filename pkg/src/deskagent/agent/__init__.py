"""Agent loop: prompt composition, visual history, adapters, episode runner."""

from deskagent.agent.prompt import (
    compose_system_prompt,
    default_template,
    format_datetime,
)
from deskagent.agent.history import HistoryContext, apply_history_cap, update_history
from deskagent.agent.adapters import (
    ActionDecision,
    AdapterTransportError,
    ApiAdapter,
    ModelAdapter,
    ScriptedAdapter,
)
from deskagent.agent.trace import EpisodeTrace, StepRecord, load_trace, save_trace
from deskagent.agent.episode import EpisodeLimits, ToolRegistry, run_episode

__all__ = [
    "ActionDecision",
    "AdapterTransportError",
    "ApiAdapter",
    "EpisodeLimits",
    "EpisodeTrace",
    "HistoryContext",
    "ModelAdapter",
    "ScriptedAdapter",
    "StepRecord",
    "ToolRegistry",
    "apply_history_cap",
    "compose_system_prompt",
    "default_template",
    "format_datetime",
    "load_trace",
    "run_episode",
    "save_trace",
    "update_history",
]
