"""Conversions between 1-indexed agent names (``m1``, ``w1``) and 0-based indices."""

from __future__ import annotations

import re
from collections.abc import Iterable, Sequence
from enum import StrEnum

_AGENT_NAME_RE = re.compile(r"^\s*(?P<side>[mw])(?P<number>[0-9]+)\s*$", re.IGNORECASE)


class Side(StrEnum):
    """Market side an agent belongs to."""

    MEN = "m"
    WOMEN = "w"

    @property
    def other(self) -> Side:
        """The opposite side."""
        return Side.WOMEN if self is Side.MEN else Side.MEN


class UnknownAgentError(RuntimeError):
    """Raised when an agent name is malformed or outside the instance."""


def agent_name(side: Side, index: int) -> str:
    """Render a 0-based index as a 1-indexed agent name.

    Args:
        side (Side): Side of the agent.
        index (int): 0-based index.

    Returns:
        str: Name such as ``m1`` or ``w3``.
    """
    return f"{side.value}{index + 1}"


def man_name(index: int) -> str:
    """Render a man index as ``m<i>``.

    Args:
        index (int): 0-based man index.

    Returns:
        str: 1-indexed man name.
    """
    return agent_name(Side.MEN, index)


def woman_name(index: int) -> str:
    """Render a woman index as ``w<j>``.

    Args:
        index (int): 0-based woman index.

    Returns:
        str: 1-indexed woman name.
    """
    return agent_name(Side.WOMEN, index)


def split_agent_name(name: str) -> tuple[Side, int]:
    """Split a name into its side and 0-based index without range checks.

    Args:
        name (str): Agent name such as ``m2``.

    Returns:
        tuple[Side, int]: Side and 0-based index.
    """
    match = _AGENT_NAME_RE.match(name)
    if match is None:
        raise UnknownAgentError(f"{name!r} is not an agent name like m1 or w1")
    number = int(match.group("number"))
    if number < 1:
        raise UnknownAgentError(f"{name!r}: agent numbers start at 1")
    return Side(match.group("side").lower()), number - 1


def parse_agent_name(name: str, *, side: Side, n: int) -> int:
    """Parse a name on a known side of an instance of size ``n``.

    Args:
        name (str): Agent name such as ``w4``.
        side (Side): Side the name must belong to.
        n (int): Number of agents per side.

    Returns:
        int: 0-based index.
    """
    parsed_side, index = split_agent_name(name)
    if parsed_side is not side:
        raise UnknownAgentError(f"{name!r} is not a {'man' if side is Side.MEN else 'woman'}")
    if index >= n:
        raise UnknownAgentError(f"{name!r} does not exist in an instance with n={n}")
    return index


def parse_agent_names(names: Iterable[str], *, side: Side, n: int) -> tuple[int, ...]:
    """Parse several names on one side, keeping their order.

    Args:
        names (Iterable[str]): Agent names.
        side (Side): Side every name must belong to.
        n (int): Number of agents per side.

    Returns:
        tuple[int, ...]: 0-based indices.
    """
    return tuple(parse_agent_name(name, side=side, n=n) for name in names)


def render_list(side: Side, indices: Sequence[int]) -> str:
    """Render indices as a space-separated list of names.

    Args:
        side (Side): Side of the listed agents.
        indices (Sequence[int]): 0-based indices.

    Returns:
        str: Names joined by single spaces.
    """
    return " ".join(agent_name(side, index) for index in indices)


def render_pairs(man_to_woman: Sequence[int]) -> str:
    """Render a matching as ``m1-w3 m2-w1 ...`` in man order.

    Args:
        man_to_woman (Sequence[int]): Partner of each man.

    Returns:
        str: Space-separated pairs.
    """
    pairs = enumerate(man_to_woman)
    return " ".join(f"{man_name(man)}-{woman_name(woman)}" for man, woman in pairs)
