"""Profile file parsing, validation and serialization (text grammar and JSON)."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .model_types import (
    DuplicateEntryError,
    IncompleteListError,
    MalformedLineError,
    PreferenceProfile,
    SizeMismatchError,
)
from .naming import Side, agent_name, render_list

_HEADER_RE = re.compile(r"^n\s*=\s*(?P<n>[0-9]+)$")
_AGENT_LINE_RE = re.compile(r"^(?P<side>[mw])(?P<number>[0-9]+)\s*:(?P<rest>.*)$")
_ENTRY_RE = re.compile(r"^(?P<side>[mw])(?P<number>[0-9]+)$")


class ProfileFormat(StrEnum):
    """Profile serialization formats."""

    TEXT = "text"
    JSON = "json"


class ProfileLoadError(RuntimeError):
    """Raised when a profile file cannot be read."""


class ProfileDocument(BaseModel):
    """JSON profile document with 1-indexed agent numbers."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    n: int = Field(ge=1)
    men: list[list[int]]
    women: list[list[int]]


@dataclass(frozen=True)
class _AgentLine:
    line: int
    entries: tuple[int, ...]


def parse_profile(text: str) -> PreferenceProfile:
    """Parse a profile from the text grammar or its JSON equivalent.

    JSON is detected by a leading ``{``.

    Args:
        text (str): Profile file contents.

    Returns:
        PreferenceProfile: Validated profile.
    """
    if text.lstrip().startswith("{"):
        return parse_profile_json(text)
    return parse_profile_text(text)


def parse_profile_text(text: str) -> PreferenceProfile:
    """Parse the line-oriented profile grammar.

    Args:
        text (str): Profile text with optional ``n=<int>`` header and one line per agent.

    Returns:
        PreferenceProfile: Validated profile.
    """
    declared_n: Optional[int] = None
    lines: dict[Side, dict[int, _AgentLine]] = {Side.MEN: {}, Side.WOMEN: {}}

    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        header = _HEADER_RE.match(line)
        if header is not None:
            if declared_n is not None:
                raise MalformedLineError("duplicate n= header", line=line_number)
            declared_n = int(header.group("n"))
            if declared_n < 1:
                raise MalformedLineError("n must be at least 1", line=line_number)
            continue
        side, agent, entries = _parse_agent_line(line, line_number)
        if agent in lines[side]:
            first = lines[side][agent].line
            raise DuplicateEntryError(
                f"{agent_name(side, agent)} already defined on line {first}", line=line_number
            )
        lines[side][agent] = _AgentLine(line=line_number, entries=entries)

    n = declared_n if declared_n is not None else len(lines[Side.MEN])
    if n == 0:
        raise IncompleteListError("profile defines no agents")
    for side in (Side.MEN, Side.WOMEN):
        if len(lines[side]) != n:
            raise SizeMismatchError(
                f"expected {n} {'men' if side is Side.MEN else 'women'}, found {len(lines[side])}"
            )
    men = _ordered_lists(lines[Side.MEN], side=Side.MEN, n=n)
    women = _ordered_lists(lines[Side.WOMEN], side=Side.WOMEN, n=n)
    return PreferenceProfile.from_lists(men, women)


def _parse_agent_line(line: str, line_number: int) -> tuple[Side, int, tuple[int, ...]]:
    match = _AGENT_LINE_RE.match(line)
    if match is None:
        raise MalformedLineError(
            f"expected 'm<i>: ...' or 'w<j>: ...', got {line!r}", line=line_number
        )
    side = Side(match.group("side"))
    agent = int(match.group("number")) - 1
    if agent < 0:
        raise MalformedLineError("agent numbers start at 1", line=line_number)

    entries: list[int] = []
    seen: set[int] = set()
    for token in match.group("rest").split():
        entry = _ENTRY_RE.match(token)
        if entry is None or Side(entry.group("side")) is not side.other:
            expected = "w<j>" if side is Side.MEN else "m<i>"
            raise MalformedLineError(
                f"entry {token!r} is not of the form {expected}", line=line_number
            )
        index = int(entry.group("number")) - 1
        if index in seen:
            raise DuplicateEntryError(
                f"{agent_name(side, agent)} lists {token} more than once", line=line_number
            )
        seen.add(index)
        entries.append(index)
    return side, agent, tuple(entries)


def _ordered_lists(by_agent: dict[int, _AgentLine], *, side: Side, n: int) -> list[tuple[int, ...]]:
    ordered: list[tuple[int, ...]] = []
    for agent in range(n):
        if agent not in by_agent:
            raise IncompleteListError(f"no preference line for {agent_name(side, agent)}")
        agent_line = by_agent[agent]
        for index in agent_line.entries:
            if not 0 <= index < n:
                raise MalformedLineError(
                    f"{agent_name(side.other, index)} is outside an instance with n={n}",
                    line=agent_line.line,
                )
        if len(agent_line.entries) != n:
            raise IncompleteListError(
                f"{agent_name(side, agent)} ranks {len(agent_line.entries)} agents, expected {n}",
                line=agent_line.line,
            )
        ordered.append(agent_line.entries)
    return ordered


def parse_profile_json(text: str) -> PreferenceProfile:
    """Parse and validate a JSON profile document.

    Args:
        text (str): JSON text of the form ``{"n": ..., "men": [[...]], "women": [[...]]}``.

    Returns:
        PreferenceProfile: Validated profile.
    """
    try:
        document = ProfileDocument.model_validate_json(text)
    except ValidationError as exc:
        raise MalformedLineError(f"invalid JSON profile document: {exc}") from exc
    for side, rows in ((Side.MEN, document.men), (Side.WOMEN, document.women)):
        if len(rows) != document.n:
            raise SizeMismatchError(
                f"expected {document.n} {'men' if side is Side.MEN else 'women'}, found {len(rows)}"
            )
    return PreferenceProfile.from_lists(
        ([entry - 1 for entry in row] for row in document.men),
        ([entry - 1 for entry in row] for row in document.women),
    )


def profile_document(profile: PreferenceProfile) -> ProfileDocument:
    """Convert a profile to its 1-indexed JSON document model.

    Args:
        profile (PreferenceProfile): Profile to convert.

    Returns:
        ProfileDocument: Document model.
    """
    return ProfileDocument(
        n=profile.n,
        men=[[entry + 1 for entry in row] for row in profile.men_prefs],
        women=[[entry + 1 for entry in row] for row in profile.women_prefs],
    )


def serialize_profile(
    profile: PreferenceProfile, *, fmt: ProfileFormat = ProfileFormat.TEXT
) -> str:
    """Serialize a profile to text or JSON.

    Args:
        profile (PreferenceProfile): Profile to serialize.
        fmt (ProfileFormat): Output format.

    Returns:
        str: Serialized profile ending in a newline.
    """
    if fmt is ProfileFormat.JSON:
        return json.dumps(profile_document(profile).model_dump(), separators=(",", ":")) + "\n"

    lines = [f"n={profile.n}"]
    for man, row in enumerate(profile.men_prefs):
        lines.append(f"{agent_name(Side.MEN, man)}: {render_list(Side.WOMEN, row)}")
    for woman, row in enumerate(profile.women_prefs):
        lines.append(f"{agent_name(Side.WOMEN, woman)}: {render_list(Side.MEN, row)}")
    return "\n".join(lines) + "\n"


def load_profile(path: Path) -> PreferenceProfile:
    """Read and parse a profile file.

    Args:
        path (Path): Profile file in the text grammar or JSON.

    Returns:
        PreferenceProfile: Validated profile.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProfileLoadError(f"Failed to read profile file {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise ProfileLoadError(f"Profile file {path} is not UTF-8: {exc}") from exc
    return parse_profile(text)


def write_profile(
    profile: PreferenceProfile, path: Path, *, fmt: ProfileFormat = ProfileFormat.TEXT
) -> None:
    """Write a profile file.

    Args:
        profile (PreferenceProfile): Profile to write.
        path (Path): Destination file.
        fmt (ProfileFormat): Output format.
    """
    try:
        path.write_text(serialize_profile(profile, fmt=fmt), encoding="utf-8")
    except OSError as exc:
        raise ProfileLoadError(f"Failed to write profile file {path}: {exc}") from exc
