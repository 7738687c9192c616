"""Preference-list surgery: splitting at a pivot, push up, push down and promotion."""

from __future__ import annotations

from collections.abc import Collection, Sequence
from typing import Optional

from .model_types import PreferenceList, PreferenceProfile, SplitPreference


class PreferenceSurgeryError(RuntimeError):
    """Raised when a list operation receives arguments it cannot apply."""


class IndexOutOfRangeError(PreferenceSurgeryError):
    """Raised when an agent index is outside the list being edited."""


class PivotInSetError(PreferenceSurgeryError):
    """Raised when the pivot itself is asked to move."""


class NotAbovePivotError(PreferenceSurgeryError):
    """Raised when push down is asked to move an agent that is not above the pivot."""


def split_list(
    preference: Sequence[int],
    pivot: int,
    *,
    reference: Optional[Sequence[int]] = None,
) -> SplitPreference:
    """Cut a list into the part above ``pivot``, the pivot and the part below.

    Args:
        preference (Sequence[int]): Complete preference list.
        pivot (int): Agent to cut at.
        reference (Optional[Sequence[int]]): Order used when push operations merge
            agents into a part. Defaults to ``preference``.

    Returns:
        SplitPreference: The three parts, each in the order of ``preference``.
    """
    order = tuple(preference)
    if not 0 <= pivot < len(order):
        raise IndexOutOfRangeError(f"pivot {pivot} outside 0..{len(order) - 1}")
    position = order.index(pivot)
    reference_order = order if reference is None else tuple(reference)
    if sorted(reference_order) != sorted(order):
        raise PreferenceSurgeryError("reference order must rank the same agents as the list")
    return SplitPreference(
        above=order[:position],
        pivot=pivot,
        below=order[position + 1 :],
        reference=reference_order,
    )


def split_at(profile: PreferenceProfile, m: int, pivot: int) -> SplitPreference:
    """Split man ``m``'s true list at woman ``pivot``.

    Args:
        profile (PreferenceProfile): Instance holding the true lists.
        m (int): Man index.
        pivot (int): Woman index to cut at, usually the man's DA partner.

    Returns:
        SplitPreference: Split of ``≻_m`` with the true list as reference.
    """
    if not 0 <= m < profile.n:
        raise IndexOutOfRangeError(f"man {m} outside 0..{profile.n - 1}")
    return split_list(profile.men_prefs[m], pivot)


def push_up(split: SplitPreference, pushed: Collection[int]) -> PreferenceList:
    """Move ``pushed`` above the pivot.

    Agents already above the pivot stay where they are.

    Args:
        split (SplitPreference): List split at the pivot.
        pushed (Collection[int]): Agents to place above the pivot.

    Returns:
        PreferenceList: ``above ∪ pushed`` in reference order, the pivot, then the rest of
        ``below`` in its current order.
    """
    moving = _validated_set(split, pushed)
    upper = set(split.above) | moving
    above = tuple(agent for agent in split.reference if agent in upper)
    below = tuple(agent for agent in split.below if agent not in moving)
    return (*above, split.pivot, *below)


def push_down(split: SplitPreference, pushed: Collection[int]) -> PreferenceList:
    """Move ``pushed`` from above the pivot to below it.

    Args:
        split (SplitPreference): List split at the pivot.
        pushed (Collection[int]): Agents currently above the pivot.

    Returns:
        PreferenceList: The rest of ``above`` in its current order, the pivot, then
        ``below ∪ pushed`` in reference order.
    """
    moving = _validated_set(split, pushed)
    not_above = sorted(moving.difference(split.above))
    if not_above:
        raise NotAbovePivotError(f"agents {not_above} are not above pivot {split.pivot}")
    lower = set(split.below) | moving
    above = tuple(agent for agent in split.above if agent not in moving)
    below = tuple(agent for agent in split.reference if agent in lower)
    return (*above, split.pivot, *below)


def _validated_set(split: SplitPreference, agents: Collection[int]) -> set[int]:
    size = len(split.reference)
    moving = set(agents)
    for agent in moving:
        if not 0 <= agent < size:
            raise IndexOutOfRangeError(f"agent {agent} outside 0..{size - 1}")
    if split.pivot in moving:
        raise PivotInSetError(f"pivot {split.pivot} cannot be moved")
    return moving


def promote(preference: Sequence[int], agent: int, position: int) -> PreferenceList:
    """Move one agent to ``position``, shifting the agents in between down by one.

    Args:
        preference (Sequence[int]): Complete preference list.
        agent (int): Agent to move.
        position (int): Target position, 0 being the top.

    Returns:
        PreferenceList: Edited list.
    """
    order = list(preference)
    if agent not in order:
        raise IndexOutOfRangeError(f"agent {agent} is not ranked in the list")
    if not 0 <= position < len(order):
        raise IndexOutOfRangeError(f"position {position} outside 0..{len(order) - 1}")
    order.remove(agent)
    order.insert(position, agent)
    return tuple(order)
