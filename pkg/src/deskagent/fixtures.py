"""Access to packaged scene and script fixtures."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

_PACKAGE_DIR = "data/fixtures"


def list_fixtures() -> list[str]:
    root = resources.files("deskagent").joinpath(_PACKAGE_DIR)
    return sorted(entry.name for entry in root.iterdir() if entry.is_file())


def read_fixture(name: str) -> str:
    root = resources.files("deskagent").joinpath(_PACKAGE_DIR)
    entry = root.joinpath(name)
    if not entry.is_file():
        raise FileNotFoundError(f"no packaged fixture named {name!r}")
    return entry.read_text("utf-8")


def resolve_fixture_text(ref: str) -> str:
    """Read fixture content from a filesystem path or a packaged name."""
    path = Path(ref)
    if path.exists():
        return path.read_text("utf-8")
    try:
        return read_fixture(ref)
    except FileNotFoundError:
        pass
    try:
        return read_fixture(ref + ".txt")
    except FileNotFoundError:
        pass
    try:
        return read_fixture(ref + ".jsonl")
    except FileNotFoundError:
        raise FileNotFoundError(
            f"{ref!r} is neither a readable path nor a packaged fixture"
        ) from None
