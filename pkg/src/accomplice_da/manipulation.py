"""Optimal accomplice and self manipulation via single-promotion search.

Every solver compares truth-telling against misreports that promote exactly one agent and
keeps the best by the target woman's true preferences. Ties are broken by lower accomplice
regret, then lower promoted-agent index, then lower position, so results do not depend on
evaluation order.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Collection
from dataclasses import dataclass
from typing import Optional

from .da_engine import da_with_misreport, da_with_woman_misreport, run_da
from .model_types import (
    AccompliceMode,
    ManipulationResult,
    Matching,
    PreferenceList,
    PreferenceProfile,
    ProposalTrace,
    Strategy,
)
from .preference_ops import promote, push_up, split_at
from .stability import blocking_pairs

type _SelectionKey = tuple[int, int, int, int]


class EmptyPoolError(RuntimeError):
    """Raised when an accomplice pool has no members."""


@dataclass(frozen=True)
class AccompliceCandidate:
    """Outcome of one accomplice promoting one woman immediately above his partner."""

    promoted: int
    misreport: PreferenceList
    outcome: Matching
    regret: int

    @property
    def keeps_partner(self) -> bool:
        """Whether the accomplice keeps his truthful partner."""
        return self.regret == 0


def accomplice_candidates(
    profile: PreferenceProfile, m: int, *, truth: Optional[Matching] = None
) -> tuple[AccompliceCandidate, ...]:
    """Run DA once for every woman man ``m`` could promote.

    Args:
        profile (PreferenceProfile): True instance.
        m (int): Accomplice.
        truth (Optional[Matching]): Truthful DA outcome, computed when omitted.

    Returns:
        tuple[AccompliceCandidate, ...]: One candidate per woman below ``m``'s partner,
        in ascending woman index.
    """
    truthful = truth if truth is not None else run_da(profile)[0]
    partner = truthful.partner_of_man(m)
    split = split_at(profile, m, partner)
    ranks = profile.men_rank[m]
    candidates: list[AccompliceCandidate] = []
    for woman in sorted(split.below):
        misreport = push_up(split, {woman})
        outcome, _ = da_with_misreport(profile, m, misreport)
        candidates.append(
            AccompliceCandidate(
                promoted=woman,
                misreport=misreport,
                outcome=outcome,
                regret=ranks[outcome.partner_of_man(m)] - ranks[partner],
            )
        )
    return tuple(candidates)


def optimal_accomplice_no_regret(
    profile: PreferenceProfile, m: int, w: int, *, truth: Optional[Matching] = None
) -> ManipulationResult:
    """Find man ``m``'s best misreport for woman ``w`` that keeps his own partner.

    Args:
        profile (PreferenceProfile): True instance.
        m (int): Accomplice.
        w (int): Woman the manipulation is for.
        truth (Optional[Matching]): Truthful DA outcome, computed when omitted.

    Returns:
        ManipulationResult: Classified best result; truth-telling when nothing helps.
    """
    return _optimal_accomplice(profile, m, w, AccompliceMode.NO_REGRET, truth=truth)


def optimal_accomplice_with_regret(
    profile: PreferenceProfile, m: int, w: int, *, truth: Optional[Matching] = None
) -> ManipulationResult:
    """Find man ``m``'s best misreport for woman ``w``, allowing him to lose his partner.

    Args:
        profile (PreferenceProfile): True instance.
        m (int): Accomplice.
        w (int): Woman the manipulation is for.
        truth (Optional[Matching]): Truthful DA outcome, computed when omitted.

    Returns:
        ManipulationResult: Classified best result; truth-telling when nothing helps.
    """
    return _optimal_accomplice(profile, m, w, AccompliceMode.WITH_REGRET, truth=truth)


def optimal_accomplice(
    profile: PreferenceProfile,
    m: int,
    w: int,
    mode: AccompliceMode,
    *,
    truth: Optional[Matching] = None,
    candidates: Optional[tuple[AccompliceCandidate, ...]] = None,
) -> ManipulationResult:
    """Dispatch to the no-regret or with-regret accomplice solver.

    Args:
        profile (PreferenceProfile): True instance.
        m (int): Accomplice.
        w (int): Woman the manipulation is for.
        mode (AccompliceMode): Strategy space.
        truth (Optional[Matching]): Truthful DA outcome, computed when omitted.
        candidates (Optional[tuple[AccompliceCandidate, ...]]): Precomputed
            ``accomplice_candidates`` for ``m``, reused across target women.

    Returns:
        ManipulationResult: Classified best result.
    """
    return _optimal_accomplice(profile, m, w, mode, truth=truth, candidates=candidates)


def _optimal_accomplice(
    profile: PreferenceProfile,
    m: int,
    w: int,
    mode: AccompliceMode,
    *,
    truth: Optional[Matching],
    candidates: Optional[tuple[AccompliceCandidate, ...]] = None,
) -> ManipulationResult:
    truthful = truth if truth is not None else run_da(profile)[0]
    pool = candidates
    if pool is None:
        pool = accomplice_candidates(profile, m, truth=truthful)
    woman_ranks = profile.women_rank[w]

    best_key: _SelectionKey = (woman_ranks[truthful.partner_of_woman(w)], 0, -1, -1)
    best: Optional[AccompliceCandidate] = None
    for candidate in pool:
        if mode is AccompliceMode.NO_REGRET and not candidate.keeps_partner:
            continue
        key = (
            woman_ranks[candidate.outcome.partner_of_woman(w)],
            candidate.regret,
            candidate.promoted,
            0,
        )
        if key < best_key:
            best_key, best = key, candidate

    result = ManipulationResult(
        strategy=mode.strategy,
        manipulator=m,
        target_woman=w,
        misreport=profile.men_prefs[m] if best is None else best.misreport,
        promoted_agent=None if best is None else best.promoted,
        outcome=truthful if best is None else best.outcome,
    )
    return classify_outcome(profile, result, truth=truthful)


def optimal_self(
    profile: PreferenceProfile,
    w: int,
    *,
    truth: Optional[Matching] = None,
    trace: Optional[ProposalTrace] = None,
) -> ManipulationResult:
    """Find woman ``w``'s best misreport that promotes a single man.

    Each man below her truthful partner is tried at every position above that partner.
    A man who never proposes to ``w`` in the truthful run is skipped: the manipulated run
    cannot diverge from the truthful one before he proposes to her, so he never does.

    Args:
        profile (PreferenceProfile): True instance.
        w (int): Manipulating woman.
        truth (Optional[Matching]): Truthful DA outcome, computed with ``trace`` when omitted.
        trace (Optional[ProposalTrace]): Truthful DA trace, computed when omitted.

    Returns:
        ManipulationResult: Classified best result; truth-telling when nothing helps.
    """
    if truth is None or trace is None:
        truth, trace = run_da(profile)
    true_list = profile.women_prefs[w]
    woman_ranks = profile.women_rank[w]
    partner_rank = woman_ranks[truth.partner_of_woman(w)]
    suitors = {man for man, woman in trace.proposals if woman == w}

    best_key: _SelectionKey = (partner_rank, 0, -1, -1)
    best: Optional[tuple[PreferenceList, int, Matching]] = None
    for man in sorted(true_list[partner_rank + 1 :]):
        if man not in suitors:
            continue
        for position in range(partner_rank + 1):
            misreport = promote(true_list, man, position)
            outcome, _ = da_with_woman_misreport(profile, w, misreport)
            key = (woman_ranks[outcome.partner_of_woman(w)], 0, man, position)
            if key < best_key:
                best_key, best = key, (misreport, man, outcome)

    result = ManipulationResult(
        strategy=Strategy.SELF,
        manipulator=w,
        target_woman=w,
        misreport=true_list if best is None else best[0],
        promoted_agent=None if best is None else best[1],
        outcome=truth if best is None else best[2],
    )
    return classify_outcome(profile, result, truth=truth)


def best_accomplice(
    profile: PreferenceProfile,
    w: int,
    pool: Collection[int],
    mode: AccompliceMode,
    *,
    truth: Optional[Matching] = None,
) -> ManipulationResult:
    """Find the best accomplice for woman ``w`` among ``pool``.

    Args:
        profile (PreferenceProfile): True instance.
        w (int): Woman the manipulation is for.
        pool (Collection[int]): Candidate accomplices.
        mode (AccompliceMode): Strategy space.
        truth (Optional[Matching]): Truthful DA outcome, computed when omitted.

    Returns:
        ManipulationResult: Best result by w's outcome, then regret, then accomplice index.
    """
    if not pool:
        raise EmptyPoolError("accomplice pool is empty")
    truthful = truth if truth is not None else run_da(profile)[0]
    woman_ranks = profile.women_rank[w]

    best: Optional[ManipulationResult] = None
    best_key: tuple[int, int, int] = (0, 0, 0)
    for man in sorted(set(pool)):
        result = _optimal_accomplice(profile, man, w, mode, truth=truthful)
        key = (woman_ranks[result.target_partner], result.regret, man)
        if best is None or key < best_key:
            best, best_key = result, key
    assert best is not None
    return best


def classify_outcome(
    profile: PreferenceProfile,
    result: ManipulationResult,
    *,
    truth: Optional[Matching] = None,
) -> ManipulationResult:
    """Fill rank deltas and stability flags against the true preferences.

    For self manipulation the regret is 0 and the single-agent stability flag asks
    whether every blocking pair involves the woman herself.

    Args:
        profile (PreferenceProfile): True instance.
        result (ManipulationResult): Result whose outcome is to be classified.
        truth (Optional[Matching]): Truthful DA outcome, computed when omitted.

    Returns:
        ManipulationResult: Copy of ``result`` with improvement, regret and flags set.
    """
    truthful = truth if truth is not None else run_da(profile)[0]
    w = result.target_woman
    woman_ranks = profile.women_rank[w]
    improvement = woman_ranks[truthful.partner_of_woman(w)] - woman_ranks[result.target_partner]

    pairs = blocking_pairs(result.outcome, profile)
    if result.strategy is Strategy.SELF:
        regret = 0
        single_agent_stable = all(woman == w for _, woman in pairs)
    else:
        m = result.manipulator
        man_ranks = profile.men_rank[m]
        outcome_rank = man_ranks[result.outcome.partner_of_man(m)]
        regret = outcome_rank - man_ranks[truthful.partner_of_man(m)]
        single_agent_stable = all(man == m for man, _ in pairs)

    return dataclasses.replace(
        result,
        improvement=improvement,
        regret=regret,
        outcome_stable_wrt_truth=not pairs,
        outcome_m_stable_wrt_truth=single_agent_stable,
    )
