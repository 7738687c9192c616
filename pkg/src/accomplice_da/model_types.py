"""Core datatypes for stable-marriage instances, matchings and manipulation results."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Optional

type PreferenceList = tuple[int, ...]
type RankTable = tuple[tuple[int, ...], ...]


class ProfileError(RuntimeError):
    """Raised when a preference profile is structurally invalid."""

    def __init__(self, message: str, *, line: Optional[int] = None) -> None:
        """Create a profile error.

        Args:
            message (str): Human-readable description of the problem.
            line (Optional[int]): 1-based source line the problem was found on, if known.
        """
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class MalformedLineError(ProfileError):
    """Raised when a profile line does not follow the profile grammar."""


class DuplicateEntryError(ProfileError):
    """Raised when a preference list or agent line repeats an agent."""


class IncompleteListError(ProfileError):
    """Raised when a preference list or agent set is shorter than n."""


class SizeMismatchError(ProfileError):
    """Raised when the two sides of an instance or a matching disagree on n."""


class InvalidMatchingError(RuntimeError):
    """Raised when a matching is not a perfect one-to-one assignment."""


def rank_table(preferences: Sequence[Sequence[int]]) -> RankTable:
    """Invert preference lists into position tables.

    Args:
        preferences (Sequence[Sequence[int]]): One complete list per agent, best first.

    Returns:
        RankTable: ``table[a][b]`` is the position of ``b`` in agent ``a``'s list.
    """
    return tuple(_invert(preference) for preference in preferences)


def _invert(preference: Sequence[int]) -> tuple[int, ...]:
    ranks = [0] * len(preference)
    for position, agent in enumerate(preference):
        ranks[agent] = position
    return tuple(ranks)


def check_permutation(values: Sequence[int], n: int, *, owner: str) -> None:
    """Validate that ``values`` is a permutation of ``0..n-1``.

    Args:
        values (Sequence[int]): Candidate list of 0-based indices.
        n (int): Expected size.
        owner (str): Agent name used in error messages.
    """
    seen: set[int] = set()
    for value in values:
        if not 0 <= value < n:
            raise MalformedLineError(f"{owner} lists index {value + 1} outside 1..{n}")
        if value in seen:
            raise DuplicateEntryError(f"{owner} lists agent {value + 1} more than once")
        seen.add(value)
    if len(seen) != n:
        raise IncompleteListError(f"{owner} ranks {len(seen)} agents, expected {n}")


@dataclass(frozen=True)
class PreferenceProfile:
    """Balanced instance with strict, complete preference lists on both sides.

    Indices are 0-based: ``men_prefs[m]`` lists woman indices best first and
    ``women_prefs[w]`` lists man indices best first.
    """

    men_prefs: tuple[PreferenceList, ...]
    women_prefs: tuple[PreferenceList, ...]
    men_rank: RankTable = field(init=False, repr=False, compare=False)
    women_rank: RankTable = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        """Validate both sides and populate the cached rank tables."""
        n = len(self.men_prefs)
        if n == 0:
            raise IncompleteListError("profile has no agents")
        if len(self.women_prefs) != n:
            raise SizeMismatchError(f"{n} men but {len(self.women_prefs)} women")
        for index, preference in enumerate(self.men_prefs):
            check_permutation(preference, n, owner=f"m{index + 1}")
        for index, preference in enumerate(self.women_prefs):
            check_permutation(preference, n, owner=f"w{index + 1}")
        object.__setattr__(self, "men_rank", rank_table(self.men_prefs))
        object.__setattr__(self, "women_rank", rank_table(self.women_prefs))

    @classmethod
    def from_lists(
        cls,
        men_prefs: Iterable[Iterable[int]],
        women_prefs: Iterable[Iterable[int]],
    ) -> PreferenceProfile:
        """Build a profile from any nested iterables of 0-based indices.

        Args:
            men_prefs (Iterable[Iterable[int]]): One list of woman indices per man.
            women_prefs (Iterable[Iterable[int]]): One list of man indices per woman.

        Returns:
            PreferenceProfile: Validated profile.
        """
        return cls(
            men_prefs=tuple(tuple(int(value) for value in row) for row in men_prefs),
            women_prefs=tuple(tuple(int(value) for value in row) for row in women_prefs),
        )

    @property
    def n(self) -> int:
        """Number of men (equal to the number of women)."""
        return len(self.men_prefs)

    def with_man_list(self, m: int, preference: Sequence[int]) -> PreferenceProfile:
        """Return a copy where man ``m`` submits ``preference``.

        Args:
            m (int): Man index.
            preference (Sequence[int]): Replacement list of woman indices.

        Returns:
            PreferenceProfile: Substituted profile; ``self`` is unchanged.
        """
        rows = list(self.men_prefs)
        rows[m] = tuple(preference)
        return PreferenceProfile(men_prefs=tuple(rows), women_prefs=self.women_prefs)

    def with_woman_list(self, w: int, preference: Sequence[int]) -> PreferenceProfile:
        """Return a copy where woman ``w`` submits ``preference``.

        Args:
            w (int): Woman index.
            preference (Sequence[int]): Replacement list of man indices.

        Returns:
            PreferenceProfile: Substituted profile; ``self`` is unchanged.
        """
        rows = list(self.women_prefs)
        rows[w] = tuple(preference)
        return PreferenceProfile(men_prefs=self.men_prefs, women_prefs=tuple(rows))

    def man_prefers(self, m: int, first: int, second: int) -> bool:
        """Return whether man ``m`` strictly prefers woman ``first`` to ``second``.

        Args:
            m (int): Man index.
            first (int): Woman index.
            second (int): Woman index.

        Returns:
            bool: ``True`` when ``first`` is ranked above ``second``.
        """
        ranks = self.men_rank[m]
        return ranks[first] < ranks[second]

    def woman_prefers(self, w: int, first: int, second: int) -> bool:
        """Return whether woman ``w`` strictly prefers man ``first`` to ``second``.

        Args:
            w (int): Woman index.
            first (int): Man index.
            second (int): Man index.

        Returns:
            bool: ``True`` when ``first`` is ranked above ``second``.
        """
        ranks = self.women_rank[w]
        return ranks[first] < ranks[second]


@dataclass(frozen=True)
class Matching:
    """Perfect matching stored as the woman index assigned to each man."""

    man_to_woman: tuple[int, ...]
    woman_to_man: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        """Validate the assignment and cache its inverse."""
        n = len(self.man_to_woman)
        inverse = [-1] * n
        for man, woman in enumerate(self.man_to_woman):
            if not 0 <= woman < n or inverse[woman] != -1:
                raise InvalidMatchingError(
                    f"man_to_woman {list(self.man_to_woman)!r} is not a permutation of 0..{n - 1}"
                )
            inverse[woman] = man
        object.__setattr__(self, "woman_to_man", tuple(inverse))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> Matching:
        """Build a matching from ``(man, woman)`` pairs.

        Args:
            pairs (Iterable[tuple[int, int]]): One pair per man, any order.

        Returns:
            Matching: The corresponding matching.
        """
        ordered = sorted(pairs)
        if [man for man, _ in ordered] != list(range(len(ordered))):
            raise InvalidMatchingError(f"pairs do not cover every man exactly once: {ordered!r}")
        return cls(man_to_woman=tuple(woman for _, woman in ordered))

    @property
    def n(self) -> int:
        """Number of matched pairs."""
        return len(self.man_to_woman)

    def partner_of_man(self, m: int) -> int:
        """Return the woman matched to man ``m``.

        Args:
            m (int): Man index.

        Returns:
            int: Woman index.
        """
        return self.man_to_woman[m]

    def partner_of_woman(self, w: int) -> int:
        """Return the man matched to woman ``w``.

        Args:
            w (int): Woman index.

        Returns:
            int: Man index.
        """
        return self.woman_to_man[w]

    def pairs(self) -> tuple[tuple[int, int], ...]:
        """Return ``(man, woman)`` pairs in man order."""
        return tuple(enumerate(self.man_to_woman))


@dataclass(frozen=True)
class SplitPreference:
    """A preference list cut at a pivot: ``above``, ``pivot``, ``below``.

    ``reference`` is the order push operations use when merging agents into a part.
    """

    above: PreferenceList
    pivot: int
    below: PreferenceList
    reference: PreferenceList

    def as_list(self) -> PreferenceList:
        """Return the list this split describes."""
        return (*self.above, self.pivot, *self.below)


@dataclass(frozen=True)
class ProposalTrace:
    """Proposals ``(man, woman)`` in the order a DA run made them."""

    proposals: tuple[tuple[int, int], ...]

    def as_set(self) -> frozenset[tuple[int, int]]:
        """Return the proposals as an unordered set."""
        return frozenset(self.proposals)

    def proposals_of(self, proposer: int) -> tuple[int, ...]:
        """Return the receivers ``proposer`` approached, in order.

        Args:
            proposer (int): Proposing agent index.

        Returns:
            tuple[int, ...]: Receiver indices in proposal order.
        """
        return tuple(receiver for agent, receiver in self.proposals if agent == proposer)

    def __len__(self) -> int:
        """Return the number of proposals."""
        return len(self.proposals)


class Strategy(StrEnum):
    """Manipulation strategy families."""

    SELF = "self"
    ACCOMPLICE_NO_REGRET = "accomplice-nr"
    ACCOMPLICE_WITH_REGRET = "accomplice-wr"


class AccompliceMode(StrEnum):
    """Whether an accomplice may end up with a different partner."""

    NO_REGRET = "no-regret"
    WITH_REGRET = "with-regret"

    @property
    def strategy(self) -> Strategy:
        """Strategy family this mode searches."""
        if self is AccompliceMode.NO_REGRET:
            return Strategy.ACCOMPLICE_NO_REGRET
        return Strategy.ACCOMPLICE_WITH_REGRET


@dataclass(frozen=True)
class ManipulationResult:
    """A misreport for the manipulating pair and what it achieves.

    ``manipulator`` is the accomplice man, or the woman herself for self manipulation.
    ``improvement`` and ``regret`` are rank differences on true lists.
    """

    strategy: Strategy
    manipulator: int
    target_woman: int
    misreport: PreferenceList
    promoted_agent: Optional[int]
    outcome: Matching
    improvement: int = 0
    regret: int = 0
    outcome_stable_wrt_truth: bool = True
    outcome_m_stable_wrt_truth: bool = True

    @property
    def target_partner(self) -> int:
        """Man matched to the target woman in the outcome."""
        return self.outcome.partner_of_woman(self.target_woman)
