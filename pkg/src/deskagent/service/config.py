"""Service configuration: defaults < config file (JSON) < environment.

Environment variables: DESKAGENT_BIND, DESKAGENT_DATA_DIR, DESKAGENT_JAIL_ROOT,
DESKAGENT_RESOLUTION, DESKAGENT_HISTORY_CAP, DESKAGENT_STEP_LIMIT,
DESKAGENT_RISK_POLICY, DESKAGENT_TOKEN, DESKAGENT_BASH_TIMEOUT.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path

_ENV_MAP = {
    "bind": "DESKAGENT_BIND",
    "data_dir": "DESKAGENT_DATA_DIR",
    "jail_root": "DESKAGENT_JAIL_ROOT",
    "resolution": "DESKAGENT_RESOLUTION",
    "history_cap": "DESKAGENT_HISTORY_CAP",
    "step_limit": "DESKAGENT_STEP_LIMIT",
    "risk_policy_file": "DESKAGENT_RISK_POLICY",
    "token": "DESKAGENT_TOKEN",
    "bash_timeout_s": "DESKAGENT_BASH_TIMEOUT",
}

_INT_FIELDS = {"history_cap", "step_limit"}
_FLOAT_FIELDS = {"bash_timeout_s"}


@dataclass
class ServiceConfig:
    bind: str = "127.0.0.1:8700"
    data_dir: str = "deskagent-data"
    jail_root: str | None = None
    resolution: str = "1366x768"
    history_cap: int = 10
    step_limit: int = 40
    risk_policy_file: str | None = None
    token: str | None = None
    bash_timeout_s: float = 120.0

    @property
    def bind_host_port(self) -> tuple[str, int]:
        host, _, port = self.bind.rpartition(":")
        return host or "127.0.0.1", int(port)


def load_config(path: str | Path | None = None, env: dict | None = None) -> ServiceConfig:
    env = os.environ if env is None else env
    values: dict = {}
    if path is not None:
        payload = json.loads(Path(path).read_text("utf-8"))
        known = {f.name for f in fields(ServiceConfig)}
        unknown = set(payload) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        values.update(payload)
    for field_name, var in _ENV_MAP.items():
        if var in env and env[var] != "":
            values[field_name] = env[var]
    for name in _INT_FIELDS:
        if name in values:
            values[name] = int(values[name])
    for name in _FLOAT_FIELDS:
        if name in values:
            values[name] = float(values[name])
    return ServiceConfig(**values)
