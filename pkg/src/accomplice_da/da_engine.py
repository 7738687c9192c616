"""Deferred acceptance with proposal tracing."""

from __future__ import annotations

from collections.abc import Sequence

from .model_types import (
    Matching,
    PreferenceProfile,
    ProfileError,
    ProposalTrace,
    check_permutation,
    rank_table,
)


class InvalidMisreportError(RuntimeError):
    """Raised when a submitted list is not a permutation of the other side."""


def run_da(profile: PreferenceProfile) -> tuple[Matching, ProposalTrace]:
    """Run men-proposing deferred acceptance.

    Args:
        profile (PreferenceProfile): Instance to solve.

    Returns:
        tuple[Matching, ProposalTrace]: Men-optimal stable matching and every proposal
        in execution order.
    """
    man_to_woman, proposals = _deferred_acceptance(profile.men_prefs, profile.women_rank)
    return Matching(man_to_woman=man_to_woman), ProposalTrace(proposals=proposals)


def run_da_women_proposing(profile: PreferenceProfile) -> Matching:
    """Run women-proposing deferred acceptance.

    Args:
        profile (PreferenceProfile): Instance to solve.

    Returns:
        Matching: Women-optimal stable matching.
    """
    woman_to_man, _ = _deferred_acceptance(profile.women_prefs, profile.men_rank)
    man_to_woman = [0] * profile.n
    for woman, man in enumerate(woman_to_man):
        man_to_woman[man] = woman
    return Matching(man_to_woman=tuple(man_to_woman))


def da_with_misreport(
    profile: PreferenceProfile, m: int, preference: Sequence[int]
) -> tuple[Matching, ProposalTrace]:
    """Run men-proposing DA with man ``m`` submitting ``preference``.

    Args:
        profile (PreferenceProfile): True instance; left untouched.
        m (int): Misreporting man.
        preference (Sequence[int]): Submitted list of woman indices.

    Returns:
        tuple[Matching, ProposalTrace]: Outcome and trace on the substituted profile.
    """
    submitted = _validated_misreport(preference, profile.n, owner=f"m{m + 1}")
    rows = list(profile.men_prefs)
    rows[m] = submitted
    man_to_woman, proposals = _deferred_acceptance(rows, profile.women_rank)
    return Matching(man_to_woman=man_to_woman), ProposalTrace(proposals=proposals)


def da_with_woman_misreport(
    profile: PreferenceProfile, w: int, preference: Sequence[int]
) -> tuple[Matching, ProposalTrace]:
    """Run men-proposing DA with woman ``w`` submitting ``preference``.

    Args:
        profile (PreferenceProfile): True instance; left untouched.
        w (int): Misreporting woman.
        preference (Sequence[int]): Submitted list of man indices.

    Returns:
        tuple[Matching, ProposalTrace]: Outcome and trace on the substituted profile.
    """
    submitted = _validated_misreport(preference, profile.n, owner=f"w{w + 1}")
    ranks = list(profile.women_rank)
    ranks[w] = rank_table((submitted,))[0]
    man_to_woman, proposals = _deferred_acceptance(profile.men_prefs, ranks)
    return Matching(man_to_woman=man_to_woman), ProposalTrace(proposals=proposals)


def _validated_misreport(preference: Sequence[int], n: int, *, owner: str) -> tuple[int, ...]:
    submitted = tuple(preference)
    try:
        check_permutation(submitted, n, owner=owner)
    except ProfileError as exc:
        raise InvalidMisreportError(str(exc)) from exc
    return submitted


def _deferred_acceptance(
    proposer_prefs: Sequence[Sequence[int]],
    receiver_rank: Sequence[Sequence[int]],
) -> tuple[tuple[int, ...], tuple[tuple[int, int], ...]]:
    # Rounds: every free proposer, in ascending index order, makes one proposal.
    n = len(proposer_prefs)
    next_choice = [0] * n
    holder = [-1] * n
    proposals: list[tuple[int, int]] = []
    free = list(range(n))
    while free:
        rejected: list[int] = []
        for proposer in free:
            receiver = proposer_prefs[proposer][next_choice[proposer]]
            next_choice[proposer] += 1
            proposals.append((proposer, receiver))
            current = holder[receiver]
            if current < 0:
                holder[receiver] = proposer
            elif receiver_rank[receiver][proposer] < receiver_rank[receiver][current]:
                holder[receiver] = proposer
                rejected.append(current)
            else:
                rejected.append(proposer)
        free = sorted(rejected)

    matched = [0] * n
    for receiver, proposer in enumerate(holder):
        matched[proposer] = receiver
    return tuple(matched), tuple(proposals)
