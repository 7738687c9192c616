"""Blocking pairs, m-stability, stable-set enumeration and lattice meet/join."""

from __future__ import annotations

import functools
import logging
from collections.abc import Iterator
from dataclasses import dataclass

from .model_types import Matching, PreferenceProfile, SizeMismatchError

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_CAP = 9


class InstanceTooLargeError(RuntimeError):
    """Raised when an exhaustive routine is asked to handle more agents than its cap."""


class InputNotStableError(RuntimeError):
    """Raised when a lattice operation receives a matching with blocking pairs."""


class InconsistentLatticeError(RuntimeError):
    """Raised when man-side and woman-side lattice assignments disagree."""


@dataclass(frozen=True)
class StableSet:
    """All stable matchings of one profile."""

    matchings: frozenset[Matching]

    def __contains__(self, matching: object) -> bool:
        """Return whether ``matching`` is a member."""
        return matching in self.matchings

    def __iter__(self) -> Iterator[Matching]:
        """Iterate members in lexicographic ``man_to_woman`` order."""
        return iter(self.sorted())

    def __len__(self) -> int:
        """Return the number of stable matchings."""
        return len(self.matchings)

    def sorted(self) -> tuple[Matching, ...]:
        """Return members in lexicographic ``man_to_woman`` order."""
        return tuple(sorted(self.matchings, key=lambda matching: matching.man_to_woman))

    def issubset(self, other: StableSet) -> bool:
        """Return whether every member is also a member of ``other``.

        Args:
            other (StableSet): Candidate superset.

        Returns:
            bool: ``True`` when ``self ⊆ other``.
        """
        return self.matchings <= other.matchings

    def men_optimal(self, profile: PreferenceProfile) -> Matching:
        """Return the join of every member, the matching each man likes best.

        Args:
            profile (PreferenceProfile): Preferences the members are stable under.

        Returns:
            Matching: Join-maximum of the set.
        """
        return functools.reduce(lambda left, right: join(left, right, profile), self._members())

    def women_optimal(self, profile: PreferenceProfile) -> Matching:
        """Return the meet of every member, the matching each woman likes best.

        Args:
            profile (PreferenceProfile): Preferences the members are stable under.

        Returns:
            Matching: Meet-minimum of the set.
        """
        return functools.reduce(lambda left, right: meet(left, right, profile), self._members())

    def _members(self) -> tuple[Matching, ...]:
        members = self.sorted()
        if not members:
            raise InconsistentLatticeError("stable set is empty")
        return members


def _check_size(matching: Matching, profile: PreferenceProfile) -> None:
    if matching.n != profile.n:
        raise SizeMismatchError(f"matching has {matching.n} pairs but profile has n={profile.n}")


def blocking_pairs(matching: Matching, profile: PreferenceProfile) -> list[tuple[int, int]]:
    """List every pair that prefers each other to their assigned partners.

    Args:
        matching (Matching): Matching to audit.
        profile (PreferenceProfile): Preferences to audit against.

    Returns:
        list[tuple[int, int]]: ``(man, woman)`` pairs in lexicographic order.
    """
    _check_size(matching, profile)
    pairs: list[tuple[int, int]] = []
    for man in range(profile.n):
        partner = matching.man_to_woman[man]
        for woman in profile.men_prefs[man]:
            if woman == partner:
                break
            ranks = profile.women_rank[woman]
            if ranks[man] < ranks[matching.woman_to_man[woman]]:
                pairs.append((man, woman))
    pairs.sort()
    return pairs


def is_stable(matching: Matching, profile: PreferenceProfile) -> bool:
    """Return whether ``matching`` has no blocking pair.

    Args:
        matching (Matching): Matching to audit.
        profile (PreferenceProfile): Preferences to audit against.

    Returns:
        bool: ``True`` when stable.
    """
    return not blocking_pairs(matching, profile)


def is_m_stable(matching: Matching, profile: PreferenceProfile, m: int) -> bool:
    """Return whether every blocking pair involves man ``m``.

    Args:
        matching (Matching): Matching to audit.
        profile (PreferenceProfile): Preferences to audit against.
        m (int): The designated man.

    Returns:
        bool: ``True`` when no blocking pair leaves out ``m``.
    """
    return all(man == m for man, _ in blocking_pairs(matching, profile))


def enumerate_stable(
    profile: PreferenceProfile, *, max_n: int = DEFAULT_ENUMERATION_CAP
) -> StableSet:
    """Enumerate every stable matching by recursive extension.

    Men are assigned in index order; a partial assignment is abandoned as soon as two
    assigned agents form a blocking pair, since later assignments cannot remove it.

    Args:
        profile (PreferenceProfile): Instance to enumerate.
        max_n (int): Largest instance accepted.

    Returns:
        StableSet: Exactly the stable matchings of ``profile``.
    """
    n = profile.n
    if n > max_n:
        raise InstanceTooLargeError(f"stable-set enumeration is capped at n={max_n}, got n={n}")

    men_rank = profile.men_rank
    women_rank = profile.women_rank
    man_to_woman = [-1] * n
    woman_to_man = [-1] * n
    found: list[Matching] = []

    def _blocks(man: int, woman: int) -> bool:
        for other_woman in profile.men_prefs[man]:
            if other_woman == woman:
                break
            holder = woman_to_man[other_woman]
            if holder >= 0 and women_rank[other_woman][man] < women_rank[other_woman][holder]:
                return True
        for other_man in profile.women_prefs[woman]:
            if other_man == man:
                break
            partner = man_to_woman[other_man]
            if partner >= 0 and men_rank[other_man][woman] < men_rank[other_man][partner]:
                return True
        return False

    def _extend(man: int) -> None:
        if man == n:
            found.append(Matching(man_to_woman=tuple(man_to_woman)))
            return
        for woman in profile.men_prefs[man]:
            if woman_to_man[woman] >= 0:
                continue
            man_to_woman[man] = woman
            woman_to_man[woman] = man
            if not _blocks(man, woman):
                _extend(man + 1)
            man_to_woman[man] = -1
            woman_to_man[woman] = -1

    _extend(0)
    logger.debug("enumerated %d stable matchings at n=%d", len(found), n)
    return StableSet(matchings=frozenset(found))


def meet(mu: Matching, mu2: Matching, profile: PreferenceProfile) -> Matching:
    """Give each man the worse and each woman the better of two stable partners.

    Args:
        mu (Matching): Stable matching.
        mu2 (Matching): Stable matching.
        profile (PreferenceProfile): Preferences both matchings are stable under.

    Returns:
        Matching: The lattice meet.
    """
    return _combine(mu, mu2, profile, men_take_better=False)


def join(mu: Matching, mu2: Matching, profile: PreferenceProfile) -> Matching:
    """Give each man the better and each woman the worse of two stable partners.

    Args:
        mu (Matching): Stable matching.
        mu2 (Matching): Stable matching.
        profile (PreferenceProfile): Preferences both matchings are stable under.

    Returns:
        Matching: The lattice join.
    """
    return _combine(mu, mu2, profile, men_take_better=True)


def _combine(
    mu: Matching, mu2: Matching, profile: PreferenceProfile, *, men_take_better: bool
) -> Matching:
    for name, matching in (("first", mu), ("second", mu2)):
        pairs = blocking_pairs(matching, profile)
        if pairs:
            raise InputNotStableError(f"{name} matching has blocking pairs {pairs}")

    n = profile.n
    men_side = [0] * n
    for man in range(n):
        first, second = mu.man_to_woman[man], mu2.man_to_woman[man]
        first_better = profile.men_rank[man][first] <= profile.men_rank[man][second]
        men_side[man] = first if first_better == men_take_better else second

    women_side = [0] * n
    for woman in range(n):
        first, second = mu.woman_to_man[woman], mu2.woman_to_man[woman]
        first_better = profile.women_rank[woman][first] <= profile.women_rank[woman][second]
        women_side[woman] = first if first_better != men_take_better else second

    for man, woman in enumerate(men_side):
        if women_side[woman] != man:
            raise InconsistentLatticeError(
                f"men-side assignment gives m{man + 1} w{woman + 1} "
                f"but women-side assignment gives w{woman + 1} m{women_side[woman] + 1}"
            )
    return Matching(man_to_woman=tuple(men_side))
